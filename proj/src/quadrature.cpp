#include "infint/quadrature.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "infint/error.hpp"

namespace infint {

double Quadrature::coefficient_sum() const {
    double s = 0.0;
    for (const auto& nd : nodes) s += nd.a;
    return s;
}

CoordinateSet Quadrature::support_union() const {
    std::vector<CoordinateSet::value_type> all;
    for (const auto& nd : nodes) all.insert(all.end(), nd.support.begin(), nd.support.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return CoordinateSet(std::move(all));
}

void Quadrature::check_admissible(double c) const {
    for (const auto& nd : nodes) {
        if (nd.t.size() != nd.support.size())
            throw Error(ErrorKind::InvalidParameters, "node coordinates do not match its support");
        for (double x : nd.t)
            if (x == c) throw Error(ErrorKind::AnchorCollision, "node coordinate equals the anchor");
    }
}

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string Quadrature::serialize() const {
    std::string out;
    for (const auto& nd : nodes) {
        out += "v:";
        for (auto j : nd.support) out += " " + std::to_string(j);
        out += " |";
        for (double x : nd.t) out += " " + fmt_double(x);
        out += " | " + fmt_double(nd.a) + "\n";
    }
    return out;
}

Quadrature Quadrature::parse(const std::string& text) {
    Quadrature q;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fail = [&] { throw Error(ErrorKind::ParseError, "quadrature line " + std::to_string(lineno)); };
        if (line.rfind("v:", 0) != 0) fail();
        auto bar1 = line.find('|');
        auto bar2 = bar1 == std::string::npos ? bar1 : line.find('|', bar1 + 1);
        if (bar2 == std::string::npos) fail();
        std::istringstream sv(line.substr(2, bar1 - 2)), st(line.substr(bar1 + 1, bar2 - bar1 - 1)),
            sa(line.substr(bar2 + 1));
        std::vector<CoordinateSet::value_type> v;
        for (long j; sv >> j;) {
            if (j < 1) fail();
            v.push_back(static_cast<CoordinateSet::value_type>(j));
        }
        QuadratureNode nd;
        for (double x; st >> x;) nd.t.push_back(x);
        if (!(sa >> nd.a)) fail();
        if (!std::is_sorted(v.begin(), v.end())) fail();
        nd.support = CoordinateSet(std::move(v));
        if (nd.t.size() != nd.support.size()) fail();
        q.nodes.push_back(std::move(nd));
    }
    return q;
}

}  // namespace infint

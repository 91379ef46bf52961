#include "infint/pointsets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "infint/error.hpp"

namespace infint {

std::size_t PolyLatticeSpec::count() const {
    std::size_t c = 1;
    for (int i = 0; i < m; ++i) c *= b;
    return c;
}

void PolyLatticeSpec::validate() const {
    if (!is_prime(b)) throw Error(ErrorKind::InvalidParameters, "base must be prime");
    if (m < 1 || m > n) throw Error(ErrorKind::InvalidParameters, "need 1 <= m <= n");
    if (p.base() != b || p.degree() != n) throw Error(ErrorKind::InvalidParameters, "modulus must have degree n");
    if (!is_irreducible(p)) throw Error(ErrorKind::InvalidParameters, "modulus must be irreducible");
    for (const auto& qi : q)
        if (qi.base() != b || qi.degree() >= n)
            throw Error(ErrorKind::InvalidParameters, "generating polynomial must have degree < n");
}

PolyLatticeSpec higher_order_spec(std::uint32_t b, int m, int alpha, std::vector<Poly> q) {
    if (alpha < 1 || m < 1) throw Error(ErrorKind::InvalidParameters, "need alpha >= 1 and m >= 1");
    PolyLatticeSpec spec;
    spec.b = b;
    spec.m = m;
    spec.n = alpha * m;
    spec.p = find_irreducible(b, spec.n);
    spec.q = std::move(q);
    for (const auto& qi : spec.q)
        if (qi.base() != b || qi.degree() >= spec.n)
            throw Error(ErrorKind::InvalidParameters, "generating polynomial must have degree < n");
    return spec;
}

DigitalShift DigitalShift::zero(std::uint32_t b, std::size_t s, int prec) {
    DigitalShift sh;
    sh.b = b;
    sh.prec = prec;
    sh.digits.assign(s, std::vector<std::uint8_t>(static_cast<std::size_t>(prec), 0));
    return sh;
}

DigitalShift DigitalShift::random(std::uint32_t b, std::size_t s, int prec, std::mt19937_64& rng) {
    DigitalShift sh = zero(b, s, prec);
    std::uniform_int_distribution<std::uint32_t> digit(0, b - 1);
    for (auto& row : sh.digits)
        for (auto& d : row) d = static_cast<std::uint8_t>(digit(rng));
    return sh;
}

PointSet::PointSet(std::uint32_t b, int prec, std::size_t count, std::size_t dim)
    : b_(b), prec_(prec), count_(count), dim_(dim),
      digits_(count * dim * static_cast<std::size_t>(prec), 0), values_(count * dim, 0.0) {}

void PointSet::refresh_values() {
    const double inv_b = 1.0 / b_;
    for (std::size_t k = 0; k < count_ * dim_; ++k) {
        const std::uint8_t* d = &digits_[k * static_cast<std::size_t>(prec_)];
        double v = 0.0;
        for (int l = prec_ - 1; l >= 0; --l) v = (v + d[l]) * inv_b;
        values_[k] = v;
    }
}

std::vector<std::vector<std::uint8_t>> lattice_basis(const PolyLatticeSpec& spec, const Poly& q) {
    // x^r q / p has the Laurent digits of q / p shifted r places
    const LaurentDigits ld = laurent_digits(poly_mod(q, spec.p), spec.p, spec.n + spec.m - 1);
    std::vector<std::vector<std::uint8_t>> basis;
    for (int r = 0; r < spec.m; ++r) basis.emplace_back(ld.digits.begin() + r, ld.digits.begin() + r + spec.n);
    return basis;
}

PointSet generate_points(const PolyLatticeSpec& spec) {
    spec.validate();
    const std::size_t count = spec.count();
    const std::uint32_t b = spec.b;
    const std::size_t n = static_cast<std::size_t>(spec.n);
    PointSet ps(b, spec.n, count, spec.dim());
    for (std::size_t j = 0; j < spec.dim(); ++j) {
        const auto basis = lattice_basis(spec, spec.q[j]);
        // x_h = x_{h - b^r} + B_r where r is the lowest nonzero digit position of h
        for (std::size_t h = 1; h < count; ++h) {
            std::size_t r = 0, pw = 1;
            while ((h / pw) % b == 0) {
                pw *= b;
                ++r;
            }
            const std::uint8_t* prev = ps.digits(h - pw, j);
            std::uint8_t* cur = ps.digits(h, j);
            for (std::size_t l = 0; l < n; ++l) cur[l] = static_cast<std::uint8_t>((prev[l] + basis[r][l]) % b);
        }
    }
    ps.refresh_values();
    return ps;
}

PointSet apply_shift(const PointSet& ps, const DigitalShift& shift) {
    if (shift.dim() != ps.dim()) throw Error(ErrorKind::InvalidParameters, "shift dimension mismatch");
    if (shift.b != ps.base()) throw Error(ErrorKind::InvalidParameters, "shift base mismatch");
    const int prec = std::max(ps.prec(), shift.prec);
    const std::uint32_t b = ps.base();
    PointSet out(b, prec, ps.count(), ps.dim());
    for (std::size_t i = 0; i < ps.count(); ++i)
        for (std::size_t j = 0; j < ps.dim(); ++j) {
            const std::uint8_t* src = ps.digits(i, j);
            std::uint8_t* dst = out.digits(i, j);
            for (int l = 0; l < prec; ++l) {
                const unsigned a = l < ps.prec() ? src[l] : 0u;
                const unsigned s = l < shift.prec ? shift.digits[j][static_cast<std::size_t>(l)] : 0u;
                dst[l] = static_cast<std::uint8_t>((a + s) % b);
            }
        }
    out.refresh_values();
    return out;
}

double anchor_perturbation(double c, std::uint32_t b, int n) {
    const double eps = std::pow(static_cast<double>(b), -(n + 2));
    return c + eps <= 1.0 ? c + eps : c - eps;
}

Quadrature equal_weight_quadrature(const PointSet& ps, std::size_t n_target, const CoordinateSet& support,
                                   double anchor, AnchorPolicy policy, int precision_n) {
    if (support.size() != ps.dim())
        throw Error(ErrorKind::InvalidParameters, "support size must equal point dimension");
    if (n_target < ps.count()) throw Error(ErrorKind::InvalidParameters, "n_target below point count");
    const int n = precision_n >= 0 ? precision_n : ps.prec();
    const double a = 1.0 / static_cast<double>(ps.count());
    Quadrature q;
    q.nodes.reserve(n_target);
    for (std::size_t i = 0; i < ps.count(); ++i) {
        QuadratureNode nd;
        nd.support = support;
        nd.t.resize(ps.dim());
        for (std::size_t j = 0; j < ps.dim(); ++j) {
            double x = ps.value(i, j);
            if (x == anchor) {
                if (policy == AnchorPolicy::Strict)
                    throw Error(ErrorKind::AnchorCollision, "lattice node coordinate equals the anchor");
                x = anchor_perturbation(anchor, ps.base(), n);
            }
            nd.t[j] = x;
        }
        nd.a = a;
        q.nodes.push_back(std::move(nd));
    }
    for (std::size_t i = ps.count(); i < n_target; ++i) {
        QuadratureNode pad = q.nodes.front();
        pad.a = 0.0;
        q.nodes.push_back(std::move(pad));
    }
    return q;
}

std::string format_point_set(const PolyLatticeSpec& spec, const PointSet* points) {
    std::ostringstream out;
    out << spec.b << ' ' << spec.m << ' ' << spec.n << ' ' << spec.p.encode() << ' ' << spec.dim() << '\n';
    for (const auto& qi : spec.q) out << qi.encode() << '\n';
    if (points) {
        char buf[40];
        for (std::size_t i = 0; i < points->count(); ++i) {
            for (std::size_t j = 0; j < points->dim(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", points->value(i, j));
                out << (j ? " " : "") << buf;
            }
            out << '\n';
        }
    }
    return out.str();
}

PolyLatticeSpec parse_point_set(const std::string& text) {
    std::istringstream in(text);
    PolyLatticeSpec spec;
    std::uint64_t p_code = 0;
    std::size_t s = 0;
    if (!(in >> spec.b >> spec.m >> spec.n >> p_code >> s))
        throw Error(ErrorKind::ParseError, "point-set header must read \"b m n p_encoded s\"");
    if (!is_prime(spec.b)) throw Error(ErrorKind::ParseError, "point-set base must be prime");
    spec.p = Poly::from_encoding(spec.b, p_code);
    for (std::size_t j = 0; j < s; ++j) {
        std::uint64_t code = 0;
        if (!(in >> code)) throw Error(ErrorKind::ParseError, "missing generating polynomial");
        spec.q.push_back(Poly::from_encoding(spec.b, code));
    }
    try {
        spec.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    return spec;
}

}  // namespace infint

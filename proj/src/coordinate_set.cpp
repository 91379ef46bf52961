#include "infint/coordinate_set.hpp"

#include <algorithm>
#include <iterator>

#include "infint/error.hpp"

namespace infint {

CoordinateSet::CoordinateSet(std::initializer_list<value_type> elems)
    : CoordinateSet(std::vector<value_type>(elems)) {}

CoordinateSet::CoordinateSet(std::vector<value_type> elems) : elems_(std::move(elems)) {
    std::sort(elems_.begin(), elems_.end());
    if (!elems_.empty() && elems_.front() == 0)
        throw Error(ErrorKind::InvalidParameters, "coordinate indices start at 1");
    if (std::adjacent_find(elems_.begin(), elems_.end()) != elems_.end())
        throw Error(ErrorKind::InvalidParameters, "duplicate coordinate in set");
}

CoordinateSet CoordinateSet::prefix(value_type n) {
    CoordinateSet out;
    out.elems_.resize(n);
    for (value_type j = 0; j < n; ++j) out.elems_[j] = j + 1;
    return out;
}

bool CoordinateSet::contains(value_type j) const {
    return std::binary_search(elems_.begin(), elems_.end(), j);
}

std::ptrdiff_t CoordinateSet::index_of(value_type j) const {
    auto it = std::lower_bound(elems_.begin(), elems_.end(), j);
    if (it == elems_.end() || *it != j) return -1;
    return it - elems_.begin();
}

bool CoordinateSet::subset_of(const CoordinateSet& other) const {
    return std::includes(other.elems_.begin(), other.elems_.end(), elems_.begin(), elems_.end());
}

CoordinateSet CoordinateSet::unite(const CoordinateSet& other) const {
    CoordinateSet out;
    std::set_union(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end(),
                   std::back_inserter(out.elems_));
    return out;
}

CoordinateSet CoordinateSet::intersect(const CoordinateSet& other) const {
    CoordinateSet out;
    std::set_intersection(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end(),
                          std::back_inserter(out.elems_));
    return out;
}

CoordinateSet CoordinateSet::minus(const CoordinateSet& other) const {
    CoordinateSet out;
    std::set_difference(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end(),
                        std::back_inserter(out.elems_));
    return out;
}

CoordinateSet CoordinateSet::with(value_type j) const {
    if (contains(j)) return *this;
    CoordinateSet out = *this;
    out.elems_.insert(std::lower_bound(out.elems_.begin(), out.elems_.end(), j), j);
    return out;
}

std::string CoordinateSet::to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < elems_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(elems_[i]);
    }
    return s + "}";
}

std::strong_ordering CoordinateSet::operator<=>(const CoordinateSet& other) const {
    if (auto c = elems_.size() <=> other.elems_.size(); c != 0) return c;
    return elems_ <=> other.elems_;
}

}  // namespace infint

#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace infint {

// Finite set of positive coordinate indices, stored strictly increasing.
class CoordinateSet {
public:
    using value_type = std::uint32_t;

    CoordinateSet() = default;
    CoordinateSet(std::initializer_list<value_type> elems);
    explicit CoordinateSet(std::vector<value_type> elems);

    // {1, ..., n}
    static CoordinateSet prefix(value_type n);

    std::size_t size() const noexcept { return elems_.size(); }
    bool empty() const noexcept { return elems_.empty(); }
    value_type max() const { return elems_.empty() ? 0 : elems_.back(); }
    value_type operator[](std::size_t i) const { return elems_[i]; }
    auto begin() const noexcept { return elems_.begin(); }
    auto end() const noexcept { return elems_.end(); }
    const std::vector<value_type>& elems() const noexcept { return elems_; }

    bool contains(value_type j) const;
    // Position of j within the set, or -1.
    std::ptrdiff_t index_of(value_type j) const;
    bool subset_of(const CoordinateSet& other) const;

    CoordinateSet unite(const CoordinateSet& other) const;
    CoordinateSet intersect(const CoordinateSet& other) const;
    CoordinateSet minus(const CoordinateSet& other) const;
    CoordinateSet with(value_type j) const;

    std::string to_string() const;

    bool operator==(const CoordinateSet&) const = default;
    // Canonical order: cardinality first, then lexicographic on elements.
    std::strong_ordering operator<=>(const CoordinateSet& other) const;

private:
    std::vector<value_type> elems_;
};

}  // namespace infint

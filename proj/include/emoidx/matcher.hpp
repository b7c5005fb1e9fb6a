#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace emoidx {

// Multi-pattern substring search (Aho-Corasick over UTF-8 bytes). Each pattern
// carries a caller-chosen group id; several patterns may share one id.
// Byte-level matching of well-formed UTF-8 is equivalent to code-point
// matching because UTF-8 is self-synchronizing.
class PatternMatcher {
public:
    PatternMatcher() = default;

    // Patterns must be non-empty. group ids are in [0, n_groups).
    PatternMatcher(const std::vector<std::string>& patterns, const std::vector<std::uint32_t>& groups,
                   std::size_t n_groups);

    // hit[g] is set for every group g with at least one pattern in text.
    // hit is resized to n_groups and cleared first.
    void find_groups(std::string_view text, std::vector<char>& hit) const;

    // True if any pattern occurs in text; stops at the first hit.
    bool contains_any(std::string_view text) const;

    std::size_t group_count() const { return n_groups_; }
    bool empty() const { return n_groups_ == 0 || outputs_.empty(); }

private:
    static constexpr std::int32_t kNone = -1;

    std::int32_t step(std::int32_t state, unsigned char c) const {
        return delta_[static_cast<std::size_t>(state) * 256 + c];
    }

    std::size_t n_groups_ = 0;
    // Dense transition table: 256 entries per state.
    std::vector<std::int32_t> delta_;
    // Per state: range [out_begin_[s], out_begin_[s+1]) into outputs_ listing
    // every group that ends at this state, including via suffix links.
    std::vector<std::uint32_t> out_begin_;
    std::vector<std::uint32_t> outputs_;
};

} // namespace emoidx

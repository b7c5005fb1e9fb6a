#include "emoidx/matcher.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace emoidx {

PatternMatcher::PatternMatcher(const std::vector<std::string>& patterns, const std::vector<std::uint32_t>& groups,
                               std::size_t n_groups)
    : n_groups_(n_groups) {
    if (patterns.size() != groups.size()) {
        throw std::invalid_argument("PatternMatcher: patterns/groups length mismatch");
    }

    // Trie over bytes, built with sparse child lists first.
    struct Node {
        std::vector<std::pair<unsigned char, std::int32_t>> children;
        std::vector<std::uint32_t> out;
        std::int32_t fail = 0;
    };
    std::vector<Node> trie(1);
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const std::string& p = patterns[i];
        if (p.empty()) throw std::invalid_argument("PatternMatcher: empty pattern");
        if (groups[i] >= n_groups) throw std::invalid_argument("PatternMatcher: group id out of range");
        std::int32_t s = 0;
        for (unsigned char c : p) {
            auto& ch = trie[static_cast<std::size_t>(s)].children;
            auto it = std::find_if(ch.begin(), ch.end(), [c](const auto& e) { return e.first == c; });
            if (it != ch.end()) {
                s = it->second;
            } else {
                const auto next = static_cast<std::int32_t>(trie.size());
                ch.emplace_back(c, next);
                trie.emplace_back();
                s = next;
            }
        }
        trie[static_cast<std::size_t>(s)].out.push_back(groups[i]);
    }

    const std::size_t n_states = trie.size();
    delta_.assign(n_states * 256, kNone);
    for (std::size_t s = 0; s < n_states; ++s) {
        for (const auto& [c, t] : trie[s].children) delta_[s * 256 + c] = t;
    }

    // BFS: fail links and completion of the goto function into a DFA.
    std::deque<std::int32_t> queue;
    for (int c = 0; c < 256; ++c) {
        std::int32_t& t = delta_[static_cast<std::size_t>(c)];
        if (t == kNone) {
            t = 0;
        } else {
            trie[static_cast<std::size_t>(t)].fail = 0;
            queue.push_back(t);
        }
    }
    std::vector<std::int32_t> order;
    order.reserve(n_states);
    while (!queue.empty()) {
        const std::int32_t s = queue.front();
        queue.pop_front();
        order.push_back(s);
        const std::int32_t f = trie[static_cast<std::size_t>(s)].fail;
        auto& own = trie[static_cast<std::size_t>(s)].out;
        const auto& inherited = trie[static_cast<std::size_t>(f)].out;
        own.insert(own.end(), inherited.begin(), inherited.end());
        for (int c = 0; c < 256; ++c) {
            std::int32_t& t = delta_[static_cast<std::size_t>(s) * 256 + static_cast<std::size_t>(c)];
            if (t == kNone) {
                t = delta_[static_cast<std::size_t>(f) * 256 + static_cast<std::size_t>(c)];
            } else {
                trie[static_cast<std::size_t>(t)].fail = delta_[static_cast<std::size_t>(f) * 256 + static_cast<std::size_t>(c)];
                queue.push_back(t);
            }
        }
    }

    out_begin_.resize(n_states + 1);
    for (std::size_t s = 0; s < n_states; ++s) {
        auto& out = trie[s].out;
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        out_begin_[s] = static_cast<std::uint32_t>(outputs_.size());
        outputs_.insert(outputs_.end(), out.begin(), out.end());
    }
    out_begin_[n_states] = static_cast<std::uint32_t>(outputs_.size());
}

void PatternMatcher::find_groups(std::string_view text, std::vector<char>& hit) const {
    hit.assign(n_groups_, 0);
    if (empty()) return;
    std::int32_t s = 0;
    for (unsigned char c : text) {
        s = step(s, c);
        const auto u = static_cast<std::size_t>(s);
        for (std::uint32_t i = out_begin_[u]; i < out_begin_[u + 1]; ++i) hit[outputs_[i]] = 1;
    }
}

bool PatternMatcher::contains_any(std::string_view text) const {
    if (empty()) return false;
    std::int32_t s = 0;
    for (unsigned char c : text) {
        s = step(s, c);
        const auto u = static_cast<std::size_t>(s);
        if (out_begin_[u] != out_begin_[u + 1]) return true;
    }
    return false;
}

} // namespace emoidx

#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace nonterm {

using State = int;

/// Fixed-universe bitset over states 0..n-1.
class StateSet {
public:
    StateSet() = default;
    explicit StateSet(int universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

    int universe() const { return universe_; }

    void insert(State q) { words_[q >> 6] |= std::uint64_t{1} << (q & 63); }
    void erase(State q) { words_[q >> 6] &= ~(std::uint64_t{1} << (q & 63)); }
    bool contains(State q) const { return (words_[q >> 6] >> (q & 63)) & 1U; }

    bool empty() const {
        for (auto w : words_)
            if (w != 0) return false;
        return true;
    }

    int size() const {
        int c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }

    bool intersects(const StateSet& other) const {
        for (std::size_t i = 0; i < words_.size() && i < other.words_.size(); ++i)
            if (words_[i] & other.words_[i]) return true;
        return false;
    }

    StateSet& operator|=(const StateSet& other) {
        for (std::size_t i = 0; i < words_.size() && i < other.words_.size(); ++i) words_[i] |= other.words_[i];
        return *this;
    }

    StateSet complement() const {
        StateSet out(universe_);
        for (State q = 0; q < universe_; ++q)
            if (!contains(q)) out.insert(q);
        return out;
    }

    std::vector<State> elements() const {
        std::vector<State> out;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            auto w = words_[i];
            while (w != 0) {
                out.push_back(static_cast<State>(i * 64 + std::countr_zero(w)));
                w &= w - 1;
            }
        }
        return out;
    }

    friend bool operator==(const StateSet&, const StateSet&) = default;

private:
    int universe_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace nonterm

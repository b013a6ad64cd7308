#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace revca {

// Set of fixed-width base-p tuples identified by their integer codes in
// [0, universe). Small universes use a dense bit vector; large ones a sorted
// code vector, so a single pair-tree node never allocates p^(2m-2) bits.
class TupleSet {
public:
    static constexpr std::uint64_t kDenseUniverseLimit = std::uint64_t{1} << 16;

    TupleSet() : universe_(0), dense_(true) {}

    explicit TupleSet(std::uint64_t universe)
        : universe_(universe), dense_(universe <= kDenseUniverseLimit) {
        if (dense_) bits_.assign((universe + 63) / 64, 0);
    }

    std::uint64_t universe() const { return universe_; }
    bool is_dense() const { return dense_; }
    std::uint64_t size() const { return count_; }
    bool empty() const { return count_ == 0; }

    void insert(std::uint64_t code) {
        if (dense_) {
            std::uint64_t& block = bits_[code >> 6];
            std::uint64_t mask = std::uint64_t{1} << (code & 63);
            if (!(block & mask)) {
                block |= mask;
                ++count_;
            }
        } else {
            codes_.push_back(code);  // deduplicated by finalize()
        }
    }

    // Sparse sets must be finalized after construction; dense sets are
    // always canonical.
    void finalize() {
        if (!dense_) {
            std::sort(codes_.begin(), codes_.end());
            codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
            count_ = codes_.size();
        }
    }

    bool contains(std::uint64_t code) const {
        if (dense_) return (bits_[code >> 6] >> (code & 63)) & 1;
        return std::binary_search(codes_.begin(), codes_.end(), code);
    }

    bool intersects(const TupleSet& other) const {
        if (universe_ != other.universe_) throw std::logic_error("tuple width mismatch");
        if (dense_) {
            for (std::size_t i = 0; i < bits_.size(); ++i) {
                if (bits_[i] & other.bits_[i]) return true;
            }
            return false;
        }
        auto a = codes_.begin(), b = other.codes_.begin();
        while (a != codes_.end() && b != other.codes_.end()) {
            if (*a == *b) return true;
            (*a < *b) ? ++a : ++b;
        }
        return false;
    }

    template <class F>
    void for_each(F&& f) const {
        if (dense_) {
            for (std::size_t i = 0; i < bits_.size(); ++i) {
                std::uint64_t block = bits_[i];
                while (block) {
                    std::uint64_t bit = block & (~block + 1);
                    f(static_cast<std::uint64_t>(i) * 64 +
                      static_cast<std::uint64_t>(std::countr_zero(block)));
                    block ^= bit;
                }
            }
        } else {
            for (std::uint64_t c : codes_) f(c);
        }
    }

    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 0x100000001b3ull;
        };
        if (dense_) {
            for (std::uint64_t b : bits_) mix(b);
        } else {
            for (std::uint64_t c : codes_) mix(c);
        }
        return h;
    }

    std::uint64_t memory_bytes() const {
        return sizeof(TupleSet) + (dense_ ? bits_.capacity() : codes_.capacity()) * 8;
    }

    friend bool operator==(const TupleSet& a, const TupleSet& b) {
        return a.universe_ == b.universe_ && a.dense_ == b.dense_ && a.count_ == b.count_ &&
               (a.dense_ ? a.bits_ == b.bits_ : a.codes_ == b.codes_);
    }

private:
    std::uint64_t universe_;
    bool dense_;
    std::uint64_t count_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<std::uint64_t> codes_;
};

// Node of a breadth-first tuple-set tree. Path labels read root to node
// spell the successor word under construction.
struct SearchNode {
    TupleSet set;
    std::int64_t parent = -1;  // -1 for the root
    std::uint32_t edge = 0;    // output state that generated this node
    std::uint32_t depth = 0;
};

inline std::vector<std::uint32_t> node_path_labels(const std::vector<SearchNode>& nodes,
                                                   std::size_t index) {
    std::vector<std::uint32_t> labels;
    for (std::int64_t at = static_cast<std::int64_t>(index); nodes[at].parent >= 0;
         at = nodes[at].parent) {
        labels.push_back(nodes[at].edge);
    }
    std::reverse(labels.begin(), labels.end());
    return labels;
}

// Tracks which sets have already been expanded, by content.
class NodeDedup {
public:
    // Registers the node's set; returns false if an equal set was seen.
    bool insert_if_new(const std::vector<SearchNode>& nodes, std::size_t index) {
        std::uint64_t h = nodes[index].set.hash();
        auto [lo, hi] = seen_.equal_range(h);
        for (auto it = lo; it != hi; ++it) {
            if (nodes[it->second].set == nodes[index].set) return false;
        }
        seen_.emplace(h, index);
        return true;
    }

    std::uint64_t memory_bytes() const { return seen_.size() * 48; }

private:
    std::unordered_multimap<std::uint64_t, std::size_t> seen_;
};

} // namespace revca

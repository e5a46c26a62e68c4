#pragma once

#include "error.hpp"
#include "psvn.hpp"

#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

namespace spurion {

// 64-bit multiplicative mixer over the packed key bytes, splitmix64 finalizer.
inline std::uint64_t hash_cells(std::span<const Symbol> key) {
    constexpr std::uint64_t kMul = 0x9E3779B97F4A7C15ULL;
    std::uint64_t h = 0xCBF29CE484222325ULL ^ key.size();
    std::size_t i = 0;
    for (; i + 8 <= key.size(); i += 8) {
        std::uint64_t w;
        std::memcpy(&w, key.data() + i, 8);
        h = (h ^ w) * kMul;
        h ^= h >> 29;
    }
    std::uint64_t tail = 0;
    for (std::size_t k = 0; i < key.size(); ++i, ++k)
        tail |= std::uint64_t{key[i]} << (8 * k);
    h = (h ^ tail) * kMul;
    h ^= h >> 30;
    h *= 0xBF58476D1CE4E5B9ULL;
    h ^= h >> 27;
    h *= 0x94D049BB133111EBULL;
    h ^= h >> 31;
    return h;
}

// Open-addressing map from fixed-length symbol vectors to 32-bit values.
// Linear probing with step 1, power-of-two capacity, doubled whenever an insert would
// push the load factor above 0.75. Keys are stored inline, padded to 4 bytes.
class StateTable {
public:
    static constexpr std::uint32_t kEmpty = 0xFFFFFFFFu;
    static constexpr std::size_t kMinCapacity = 16;
    static constexpr std::size_t kHeaderBytes = 64;

private:
    std::size_t key_len_ = 0;
    std::size_t stride_ = 0;
    std::size_t capacity_ = 0;
    std::size_t size_ = 0;
    std::vector<Symbol> keys_;
    std::vector<std::uint32_t> values_;

    std::size_t probe(std::span<const Symbol> key) const {
        std::size_t mask = capacity_ - 1;
        std::size_t slot = hash_cells(key) & mask;
        while (values_[slot] != kEmpty &&
               std::memcmp(keys_.data() + slot * stride_, key.data(), key_len_) != 0)
            slot = (slot + 1) & mask;
        return slot;
    }

    void rehash(std::size_t new_capacity) {
        std::vector<Symbol> old_keys(new_capacity * stride_, 0);
        std::vector<std::uint32_t> old_values(new_capacity, kEmpty);
        old_keys.swap(keys_);
        old_values.swap(values_);
        const std::size_t old_capacity = capacity_;
        capacity_ = new_capacity;
        for (std::size_t s = 0; s < old_capacity; ++s) {
            if (old_values[s] == kEmpty)
                continue;
            std::span<const Symbol> key(old_keys.data() + s * stride_, key_len_);
            std::size_t slot = probe(key);
            std::memcpy(keys_.data() + slot * stride_, key.data(), key_len_);
            values_[slot] = old_values[s];
        }
    }

public:
    StateTable() = default;

    explicit StateTable(std::size_t key_len, std::size_t initial_capacity = kMinCapacity)
        : key_len_(key_len), stride_((key_len + 3) / 4 * 4) {
        std::size_t cap = kMinCapacity;
        while (cap < initial_capacity)
            cap <<= 1;
        capacity_ = cap;
        keys_.assign(capacity_ * stride_, 0);
        values_.assign(capacity_, kEmpty);
    }

    std::size_t key_len() const { return key_len_; }
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return size_ == 0; }

    // Bytes per slot: padded key plus the 4-byte value.
    std::size_t slot_bytes() const { return stride_ + sizeof(std::uint32_t); }
    std::size_t size_bytes() const { return capacity_ * slot_bytes() + kHeaderBytes; }

    const std::uint32_t *find(std::span<const Symbol> key) const {
        std::size_t slot = probe(key);
        return values_[slot] == kEmpty ? nullptr : &values_[slot];
    }

    bool contains(std::span<const Symbol> key) const { return find(key) != nullptr; }

    // Inserts key -> value unless present. Returns {stored value, inserted}.
    std::pair<std::uint32_t, bool> insert(std::span<const Symbol> key, std::uint32_t value) {
        if (value == kEmpty)
            throw Error(ErrorKind::Capacity, "state table value out of range");
        std::size_t slot = probe(key);
        if (values_[slot] != kEmpty)
            return {values_[slot], false};
        if ((size_ + 1) * 4 > capacity_ * 3) {
            if (capacity_ > (std::size_t{1} << 40))
                throw Error(ErrorKind::Capacity, "state table capacity exceeded");
            rehash(capacity_ * 2);
            slot = probe(key);
        }
        std::memcpy(keys_.data() + slot * stride_, key.data(), key_len_);
        values_[slot] = value;
        ++size_;
        return {value, true};
    }

    // Visits (key, value) in slot order.
    template <typename Visit>
    void for_each(Visit &&visit) const {
        for (std::size_t s = 0; s < capacity_; ++s)
            if (values_[s] != kEmpty)
                visit(std::span<const Symbol>(keys_.data() + s * stride_, key_len_), values_[s]);
    }

    // Raw slot access for serialization.
    std::span<const Symbol> raw_keys() const { return keys_; }
    std::span<const std::uint32_t> raw_values() const { return values_; }

    static StateTable from_raw(std::size_t key_len, std::size_t capacity,
                               std::vector<Symbol> keys, std::vector<std::uint32_t> values) {
        StateTable t;
        t.key_len_ = key_len;
        t.stride_ = (key_len + 3) / 4 * 4;
        t.capacity_ = capacity;
        if (capacity < kMinCapacity || (capacity & (capacity - 1)) != 0 ||
            keys.size() != capacity * t.stride_ || values.size() != capacity)
            throw Error(ErrorKind::Invalid, "malformed state table image");
        t.keys_ = std::move(keys);
        t.values_ = std::move(values);
        for (auto v : t.values_)
            if (v != kEmpty)
                ++t.size_;
        return t;
    }
};

} // namespace spurion

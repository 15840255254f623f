// Copyright 2026 The scionsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scion/ids.hpp"

namespace scion {

using Bytes = std::vector<std::uint8_t>;

/// Big-endian append-only encoder for the canonical wire formats.
class ByteWriter {
  public:
    ByteWriter() = default;
    explicit ByteWriter(Bytes& out) : out_(&out) {}

    void u8(std::uint8_t v) { buf().push_back(v); }
    void u16(std::uint16_t v) {
        u8(static_cast<std::uint8_t>(v >> 8));
        u8(static_cast<std::uint8_t>(v));
    }
    void u32(std::uint32_t v) {
        u16(static_cast<std::uint16_t>(v >> 16));
        u16(static_cast<std::uint16_t>(v));
    }
    void u64(std::uint64_t v) {
        u32(static_cast<std::uint32_t>(v >> 32));
        u32(static_cast<std::uint32_t>(v));
    }
    void as_id(const AsId& as) {
        u16(as.isd);
        u32(as.local);
    }
    void raw(std::span<const std::uint8_t> data) {
        buf().insert(buf().end(), data.begin(), data.end());
    }
    /// u16 length prefix followed by the bytes.
    void blob(std::span<const std::uint8_t> data) {
        u16(static_cast<std::uint16_t>(data.size()));
        raw(data);
    }
    void str(std::string_view s) {
        u16(static_cast<std::uint16_t>(s.size()));
        for (char c : s) u8(static_cast<std::uint8_t>(c));
    }

    const Bytes& bytes() const { return own_; }
    Bytes take() { return std::move(own_); }

  private:
    Bytes& buf() { return out_ ? *out_ : own_; }
    Bytes own_;
    Bytes* out_ = nullptr;
};

/// Big-endian decoder; throws ParseError when the input is exhausted.
class ByteReader {
  public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint16_t u16() {
        return static_cast<std::uint16_t>((std::uint16_t{u8()} << 8) | u8());
    }
    std::uint32_t u32() { return (std::uint32_t{u16()} << 16) | u16(); }
    std::uint64_t u64() { return (std::uint64_t{u32()} << 32) | u32(); }
    AsId as_id() {
        AsId as;
        as.isd = u16();
        as.local = u32();
        return as;
    }
    Bytes raw(std::size_t n) {
        need(n);
        Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
        pos_ += n;
        return out;
    }
    Bytes blob() { return raw(u16()); }
    std::string str() {
        Bytes b = blob();
        return std::string(b.begin(), b.end());
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    std::size_t position() const { return pos_; }
    bool done() const { return pos_ == data_.size(); }

  private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw ParseError("truncated record");
    }
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(std::string_view hex);

/// FNV-1a, used for stable content digests (metric exports, dedup keys).
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> data,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (std::uint8_t b : data) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace scion

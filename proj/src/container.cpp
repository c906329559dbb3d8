// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ghost/error.hpp"

namespace ghost {

namespace {

constexpr char kMagic[4] = {'G', 'H', 'S', 'T'};

template <typename T>
void PutLe(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

class Cursor {
 public:
  Cursor(std::string_view data, const std::string& source) : data_(data), source_(source) {}

  template <typename T>
  T Le() {
    Need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string_view Take(std::size_t n) {
    Need(n);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool Done() const { return pos_ == data_.size(); }

 private:
  void Need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error(source_ + ": truncated container");
  }

  std::string_view data_;
  const std::string& source_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view KindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kCharTrie: return "CHAR_TRIE";
    case ModelKind::kSuffixTrie: return "SUFFIX_TRIE";
    case ModelKind::kNGram: return "NGRAM";
    case ModelKind::kTfIdf: return "TFIDF";
  }
  return "UNKNOWN";
}

std::uint64_t Fingerprint(const std::vector<std::string>& utterances) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& u : utterances) {
    for (char c : u) mix(static_cast<unsigned char>(c));
    mix('\n');
  }
  return h;
}

ContainerWriter::ContainerWriter(ModelKind kind, std::uint64_t fingerprint)
    : kind_(kind), fingerprint_(fingerprint) {}

void ContainerWriter::Add(std::string name, Type type, std::uint64_t count, std::string payload) {
  sections_.push_back({std::move(name), type, count, std::move(payload)});
}

void ContainerWriter::PutU32(std::string name, std::span<const std::uint32_t> values) {
  std::string p;
  p.reserve(values.size() * 4);
  for (auto v : values) PutLe(p, v);
  Add(std::move(name), Type::kU32, values.size(), std::move(p));
}

void ContainerWriter::PutU64(std::string name, std::span<const std::uint64_t> values) {
  std::string p;
  p.reserve(values.size() * 8);
  for (auto v : values) PutLe(p, v);
  Add(std::move(name), Type::kU64, values.size(), std::move(p));
}

void ContainerWriter::PutF64(std::string name, std::span<const double> values) {
  std::string p;
  p.reserve(values.size() * 8);
  for (auto v : values) PutLe(p, std::bit_cast<std::uint64_t>(v));
  Add(std::move(name), Type::kF64, values.size(), std::move(p));
}

void ContainerWriter::PutStrings(std::string name, const std::vector<std::string>& values) {
  std::string p;
  for (const auto& s : values) {
    PutLe(p, static_cast<std::uint32_t>(s.size()));
    p.append(s);
  }
  Add(std::move(name), Type::kStrings, values.size(), std::move(p));
}

void ContainerWriter::PutString(std::string name, std::string value) {
  PutStrings(std::move(name), {std::move(value)});
}

std::string ContainerWriter::Bytes() const {
  std::string out(kMagic, sizeof(kMagic));
  PutLe(out, kContainerVersion);
  PutLe(out, static_cast<std::uint32_t>(kind_));
  PutLe(out, fingerprint_);
  PutLe(out, static_cast<std::uint32_t>(sections_.size()));
  for (const auto& s : sections_) {
    PutLe(out, static_cast<std::uint16_t>(s.name.size()));
    out.append(s.name);
    PutLe(out, static_cast<std::uint8_t>(s.type));
    PutLe(out, s.count);
    out.append(s.payload);
  }
  return out;
}

void ContainerWriter::WriteFile(const std::filesystem::path& path) const {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp.string() + " for writing");
    const std::string bytes = Bytes();
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ContainerReader ContainerReader::FromFile(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open index file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return FromBytes(ss.str(), path.string());
}

ContainerReader ContainerReader::FromBytes(std::string bytes, std::string source) {
  ContainerReader r;
  r.source_ = std::move(source);
  Cursor c(bytes, r.source_);
  if (c.Take(4) != std::string_view(kMagic, 4)) {
    throw Error(r.source_ + ": not a GHST container (bad magic)");
  }
  const auto version = c.Le<std::uint32_t>();
  if (version != kContainerVersion) {
    throw Error(r.source_ + ": format version " + std::to_string(version) +
                " does not match supported version " + std::to_string(kContainerVersion));
  }
  const auto kind = c.Le<std::uint32_t>();
  if (kind < 1 || kind > 4) throw Error(r.source_ + ": unknown model kind " + std::to_string(kind));
  r.kind_ = static_cast<ModelKind>(kind);
  r.fingerprint_ = c.Le<std::uint64_t>();
  const auto n = c.Le<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto name_len = c.Le<std::uint16_t>();
    std::string name(c.Take(name_len));
    Section s;
    s.type = c.Le<std::uint8_t>();
    s.count = c.Le<std::uint64_t>();
    std::size_t bytes_len = 0;
    switch (s.type) {
      case 1: bytes_len = s.count * 4; break;
      case 2:
      case 3: bytes_len = s.count * 8; break;
      case 4: {
        // Length-prefixed strings; walk them to find the payload extent.
        Cursor probe = c;
        for (std::uint64_t k = 0; k < s.count; ++k) {
          const auto len = probe.Le<std::uint32_t>();
          probe.Take(len);
          bytes_len += 4 + len;
        }
        break;
      }
      default:
        throw Error(r.source_ + ": section '" + name + "' has unknown type");
    }
    s.payload = std::string(c.Take(bytes_len));
    r.sections_.emplace(std::move(name), std::move(s));
  }
  if (!c.Done()) throw Error(r.source_ + ": trailing bytes after last section");
  return r;
}

bool ContainerReader::Has(std::string_view name) const { return sections_.find(name) != sections_.end(); }

const ContainerReader::Section& ContainerReader::Get(std::string_view name, std::uint8_t type) const {
  auto it = sections_.find(name);
  if (it == sections_.end()) throw Error(source_ + ": missing section '" + std::string(name) + "'");
  if (it->second.type != type) throw Error(source_ + ": section '" + std::string(name) + "' has wrong type");
  return it->second;
}

std::vector<std::uint32_t> ContainerReader::U32(std::string_view name) const {
  const auto& s = Get(name, 1);
  Cursor c(s.payload, source_);
  std::vector<std::uint32_t> out(s.count);
  for (auto& v : out) v = c.Le<std::uint32_t>();
  return out;
}

std::vector<std::uint64_t> ContainerReader::U64(std::string_view name) const {
  const auto& s = Get(name, 2);
  Cursor c(s.payload, source_);
  std::vector<std::uint64_t> out(s.count);
  for (auto& v : out) v = c.Le<std::uint64_t>();
  return out;
}

std::vector<double> ContainerReader::F64(std::string_view name) const {
  const auto& s = Get(name, 3);
  Cursor c(s.payload, source_);
  std::vector<double> out(s.count);
  for (auto& v : out) v = std::bit_cast<double>(c.Le<std::uint64_t>());
  return out;
}

std::vector<std::string> ContainerReader::Strings(std::string_view name) const {
  const auto& s = Get(name, 4);
  Cursor c(s.payload, source_);
  std::vector<std::string> out;
  out.reserve(s.count);
  for (std::uint64_t k = 0; k < s.count; ++k) {
    const auto len = c.Le<std::uint32_t>();
    out.emplace_back(c.Take(len));
  }
  return out;
}

std::string ContainerReader::String(std::string_view name) const {
  auto v = Strings(name);
  if (v.size() != 1) throw Error(source_ + ": section '" + std::string(name) + "' is not a scalar string");
  return v.front();
}

void ContainerReader::ExpectKind(ModelKind expected) const {
  if (kind_ != expected) {
    throw Error(source_ + ": expected model kind " + std::string(KindName(expected)) + ", found " +
                std::string(KindName(kind_)));
  }
}

}  // namespace ghost

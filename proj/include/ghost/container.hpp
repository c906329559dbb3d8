// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Versioned binary container shared by every persisted model.
//
//   "GHST" | u32 version | u32 kind | u64 corpus fingerprint | u32 sections
//   section := u16 name_len | name | u8 type | u64 count | payload
//
// All integers are little-endian; f64 payloads are IEEE-754 bit patterns.
// Sections are named and typed so readers can validate what they load.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ghost {

inline constexpr std::uint32_t kContainerVersion = 1;

enum class ModelKind : std::uint32_t {
  kCharTrie = 1,
  kSuffixTrie = 2,
  kNGram = 3,
  kTfIdf = 4,
};

std::string_view KindName(ModelKind kind);

// FNV-1a over the training utterances, newline separated.
std::uint64_t Fingerprint(const std::vector<std::string>& utterances);

class ContainerWriter {
 public:
  ContainerWriter(ModelKind kind, std::uint64_t fingerprint);

  void PutU32(std::string name, std::span<const std::uint32_t> values);
  void PutU64(std::string name, std::span<const std::uint64_t> values);
  void PutF64(std::string name, std::span<const double> values);
  void PutStrings(std::string name, const std::vector<std::string>& values);
  void PutString(std::string name, std::string value);

  std::string Bytes() const;
  // Writes to `path` via a sibling temp file and rename.
  void WriteFile(const std::filesystem::path& path) const;

 private:
  enum class Type : std::uint8_t { kU32 = 1, kU64 = 2, kF64 = 3, kStrings = 4 };
  struct Section {
    std::string name;
    Type type;
    std::uint64_t count;
    std::string payload;
  };

  void Add(std::string name, Type type, std::uint64_t count, std::string payload);

  ModelKind kind_;
  std::uint64_t fingerprint_;
  std::vector<Section> sections_;
};

class ContainerReader {
 public:
  static ContainerReader FromFile(const std::filesystem::path& path);
  static ContainerReader FromBytes(std::string bytes, std::string source = "<memory>");

  ModelKind kind() const { return kind_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  const std::string& source() const { return source_; }
  bool Has(std::string_view name) const;

  std::vector<std::uint32_t> U32(std::string_view name) const;
  std::vector<std::uint64_t> U64(std::string_view name) const;
  std::vector<double> F64(std::string_view name) const;
  std::vector<std::string> Strings(std::string_view name) const;
  std::string String(std::string_view name) const;

  // Throws unless the container holds `expected`.
  void ExpectKind(ModelKind expected) const;

 private:
  struct Section {
    std::uint8_t type;
    std::uint64_t count;
    std::string payload;
  };
  const Section& Get(std::string_view name, std::uint8_t type) const;

  std::string source_;
  ModelKind kind_{};
  std::uint64_t fingerprint_ = 0;
  std::map<std::string, Section, std::less<>> sections_;
};

}  // namespace ghost

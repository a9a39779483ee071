// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ctvgan {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'C', 'T', 'V', 'C', 'K', 'P', 'T', '1'};

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& what) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("truncated checkpoint while reading " + what);
  return value;
}

std::string get_string(std::istream& in, std::size_t len, const std::string& what) {
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error("truncated checkpoint while reading " + what);
  return s;
}

}  // namespace

void Checkpoint::save(const std::filesystem::path& path) const {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [key, t] : tensors) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(key.size()));
      out.write(key.data(), static_cast<std::streamsize>(key.size()));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
      for (auto d : t.shape()) put<std::int64_t>(out, d);
      out.write(reinterpret_cast<const char*>(t.data().data()), static_cast<std::streamsize>(t.numel() * sizeof(double)));
    }
    put<std::uint32_t>(out, static_cast<std::uint32_t>(strings.size()));
    for (const auto& [key, s] : strings) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(key.size()));
      out.write(key.data(), static_cast<std::streamsize>(key.size()));
      put<std::uint64_t>(out, s.size());
      out.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error(path.string() + " is not a ctvgan checkpoint");
  }
  Checkpoint ck;
  const auto n = get<std::uint32_t>(in, "tensor count");
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto key = get_string(in, get<std::uint32_t>(in, "key length"), "key");
    const auto rank = get<std::uint32_t>(in, "rank of " + key);
    if (rank > 8) throw std::runtime_error("implausible rank for " + key);
    Shape shape(rank);
    for (auto& d : shape) d = get<std::int64_t>(in, "shape of " + key);
    Tensor t(shape);
    in.read(reinterpret_cast<char*>(t.data().data()), static_cast<std::streamsize>(t.numel() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated checkpoint while reading values of " + key);
    ck.tensors.emplace(key, std::move(t));
  }
  const auto m = get<std::uint32_t>(in, "string count");
  for (std::uint32_t i = 0; i < m; ++i) {
    const auto key = get_string(in, get<std::uint32_t>(in, "key length"), "key");
    const auto len = get<std::uint64_t>(in, "length of " + key);
    ck.strings.emplace(key, get_string(in, static_cast<std::size_t>(len), key));
  }
  return ck;
}

std::map<std::string, Tensor> Checkpoint::with_prefix(const std::string& prefix) const {
  std::map<std::string, Tensor> out;
  for (auto it = tensors.lower_bound(prefix); it != tensors.end() && it->first.rfind(prefix, 0) == 0; ++it) {
    out.insert(*it);
  }
  return out;
}

const std::string& Checkpoint::string(const std::string& key) const {
  auto it = strings.find(key);
  if (it == strings.end()) throw std::runtime_error("checkpoint has no entry '" + key + "'");
  return it->second;
}

}  // namespace ctvgan

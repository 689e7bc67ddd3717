#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anchorlab/matrix.hpp"

namespace anchorlab {

/// Serialized model snapshot. Text format, one logical record per line:
///
///   anchorlab-checkpoint 1
///   meta <key> <value>          (repeated; value is a single token)
///   anchors <k> <id...>         (anchor set active at the saved epoch)
///   tensor <name> <rows> <cols> (followed by rows*cols hex words)
///   end
///
/// Doubles are stored as 16-digit hex IEEE-754 bit patterns, which makes the
/// round trip bit-exact regardless of locale or printf rounding.
struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::vector<int> anchors;
  std::vector<std::pair<std::string, Matrix>> tensors;

  const Matrix& tensor(const std::string& name) const {
    for (const auto& [n, m] : tensors) {
      if (n == name) return m;
    }
    throw std::runtime_error("checkpoint: missing tensor '" + name + "'");
  }

  const std::string& meta_at(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) throw std::runtime_error("checkpoint: missing meta key '" + key + "'");
    return it->second;
  }
};

namespace detail {

inline std::string double_to_hex(double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(bits));
  return std::string(buf);
}

inline double hex_to_double(const std::string& s) {
  if (s.size() != 16) throw std::runtime_error("checkpoint: bad hex word '" + s + "'");
  std::uint64_t bits = 0;
  for (char c : s) {
    int digit;
    if (c >= '0' && c <= '9') digit = c - '0';
    else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') digit = c - 'A' + 10;
    else throw std::runtime_error("checkpoint: bad hex word '" + s + "'");
    bits = (bits << 4) | static_cast<std::uint64_t>(digit);
  }
  double x;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

}  // namespace detail

inline void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << "anchorlab-checkpoint 1\n";
  for (const auto& [k, v] : ck.meta) out << "meta " << k << " " << v << "\n";
  out << "anchors " << ck.anchors.size();
  for (int a : ck.anchors) out << " " << a;
  out << "\n";
  for (const auto& [name, m] : ck.tensors) {
    out << "tensor " << name << " " << m.rows() << " " << m.cols() << "\n";
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) {
        out << detail::double_to_hex(m(i, j)) << (j + 1 == m.cols() ? "" : " ");
      }
      out << "\n";
    }
  }
  out << "end\n";
  if (!out) throw std::runtime_error("save_checkpoint: write failed on " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::string header;
  int version = 0;
  if (!(in >> header >> version) || header != "anchorlab-checkpoint" || version != 1) {
    throw std::runtime_error("load_checkpoint: " + path + " is not a version-1 checkpoint");
  }
  Checkpoint ck;
  std::string tag;
  bool saw_end = false;
  while (in >> tag) {
    if (tag == "meta") {
      std::string k, v;
      if (!(in >> k >> v)) throw std::runtime_error("load_checkpoint: truncated meta line");
      ck.meta[k] = v;
    } else if (tag == "anchors") {
      std::size_t k;
      if (!(in >> k)) throw std::runtime_error("load_checkpoint: truncated anchor line");
      ck.anchors.resize(k);
      for (std::size_t i = 0; i < k; ++i) {
        if (!(in >> ck.anchors[i])) throw std::runtime_error("load_checkpoint: truncated anchor line");
      }
    } else if (tag == "tensor") {
      std::string name;
      int rows, cols;
      if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0) {
        throw std::runtime_error("load_checkpoint: bad tensor header");
      }
      Matrix m(rows, cols);
      std::string word;
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
          if (!(in >> word)) {
            throw std::runtime_error("load_checkpoint: truncated tensor '" + name + "'");
          }
          m(i, j) = detail::hex_to_double(word);
        }
      }
      ck.tensors.emplace_back(std::move(name), std::move(m));
    } else if (tag == "end") {
      saw_end = true;
      break;
    } else {
      throw std::runtime_error("load_checkpoint: unknown record '" + tag + "'");
    }
  }
  if (!saw_end) throw std::runtime_error("load_checkpoint: " + path + " missing end marker");
  return ck;
}

}  // namespace anchorlab

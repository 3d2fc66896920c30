#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrm/image.h"
#include "qrm/word.h"

namespace qrm {

// Qif-table node. Links hold node ids (1-based, 0 = absent); in QRAM each
// node is 9 words: w then the links in this order, as absolute addresses.
enum Link { Nx, Fc0, Fc1, Lc0, Lc1, Pr, Cf, Cl };
inline constexpr int kNodeWords = 9;

struct QifNode {
  Word w = 0;
  std::array<int, 8> link{};

  bool operator==(const QifNode&) const = default;
};

struct QifTable {
  std::vector<QifNode> nodes;  // id k is nodes[k-1]; the root is id 1

  QifNode& at(int id) { return nodes.at(id - 1); }
  const QifNode& at(int id) const { return nodes.at(id - 1); }
  int size() const { return static_cast<int>(nodes.size()); }

  std::vector<Word> encode(Word base) const;
  static QifTable decode(const std::vector<Word>& words, Word base);

  // Empty when every link has its inverse and each join has a zero wait.
  std::string check() const;
  std::string dump() const;

  bool operator==(const QifTable&) const = default;
};

struct QVar {
  std::string name;
  std::optional<Word> index;  // none for a scalar
  Word address = 0;

  bool operator==(const QVar&) const = default;
};

enum class Schedule { DepthFirst, Random };

struct EvalOptions {
  std::uint64_t t_prac = 10'000'000;
  Schedule schedule = Schedule::DepthFirst;
  std::uint64_t seed = 0;
  Word margin = 0;  // extra words after the largest subscript seen
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Allocation {
  std::string name;
  Word address = 0;
  Word extent = 0;
};

struct EvalResult {
  bool timeout = false;
  std::uint64_t t_exe = 0;
  std::uint64_t work = 0;            // instructions summed over all processes
  std::uint64_t parallel_depth = 0;  // longest root-to-leaf instruction count
  QifTable table;
  std::vector<Allocation> allocation;  // every non-entry symbol
  std::map<std::string, Word> inputs;
  std::vector<QVar> qvars;  // sorted by (name, index)
  std::vector<std::string> diagnostics;
};

// Classical emulation with one process per quantum branch. inputs bind
// the main formals.
EvalResult evaluate(const Image& img, const std::map<std::string, Word>& inputs,
                    const EvalOptions& opt = {});

// Writes the allocation, inputs and qif table into the image.
void apply(Image& img, const EvalResult& r);

std::string qtab_to_json(const Image& img, const EvalResult& r);
EvalResult qtab_from_json(const std::string& text);

}  // namespace qrm

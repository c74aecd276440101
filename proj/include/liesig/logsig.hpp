#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "liesig/bch.hpp"
#include "liesig/lie.hpp"
#include "liesig/tensor.hpp"
#include "liesig/words.hpp"

namespace liesig {

enum class LogSigMethod { bch, tensor };

inline LogSigMethod parse_logsig_method(std::string_view name) {
  if (name == "bch") return LogSigMethod::bch;
  if (name == "tensor") return LogSigMethod::tensor;
  throw std::invalid_argument("unknown log signature method '" + std::string(name) + "'");
}

/// Everything needed to take log signatures at a fixed (d, m).
struct LogSigContext {
  BasisPtr basis;
  std::optional<BchTable> bch;

  /// Builds the basis and, when m is small enough, derives the BCH table.
  static LogSigContext prepare(int dim, int level) {
    LogSigContext ctx{LyndonBasis::make(dim, level), std::nullopt};
    if (level <= kMaxComputedBchLevel) ctx.bch = compute_bch_table(level);
    return ctx;
  }
  static LogSigContext prepare(int dim, int level, BchTable table) {
    if (table.level() < level) throw std::invalid_argument("BCH table level is below the truncation level");
    return LogSigContext{LyndonBasis::make(dim, level), std::move(table)};
  }

  int dim() const { return basis->dim(); }
  int level() const { return basis->level(); }
};

/// log(signature) pulled back to Lyndon coordinates.
inline LieElement<double> path_logsig_tensor(const PathPoints& path, const BasisPtr& basis) {
  if (path.empty()) throw std::invalid_argument("path has no points");
  if (path.dim() != basis->dim()) throw std::invalid_argument("path dimension differs from basis dimension");
  return project_from_tensor(tensor_log(path_signature(path, basis->level())), basis);
}

/// Left fold of bch_concat over the segments; each segment's log signature
/// is its displacement.
inline LieElement<double> path_logsig_bch(const PathPoints& path, const BasisPtr& basis, const BchTable& table) {
  if (path.empty()) throw std::invalid_argument("path has no points");
  if (path.dim() != basis->dim()) throw std::invalid_argument("path dimension differs from basis dimension");
  LieElement<double> acc(basis);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    auto disp = path.displacement(i);
    auto segment = LieElement<double>::from_vector(basis, disp);
    acc = i == 0 ? segment : bch_concat(acc, segment, table);
  }
  return acc;
}

inline LieElement<double> path_logsig(const PathPoints& path, const LogSigContext& ctx,
                                      LogSigMethod method = LogSigMethod::bch) {
  if (method == LogSigMethod::tensor) return path_logsig_tensor(path, ctx.basis);
  if (!ctx.bch) throw std::invalid_argument("no BCH table available at this level");
  return path_logsig_bch(path, ctx.basis, *ctx.bch);
}

struct Sizes {
  std::uint64_t signature;
  std::uint64_t log_signature;
  friend bool operator==(const Sizes&, const Sizes&) = default;
};

/// Signature size excludes the constant empty-word coefficient.
inline Sizes sizes(int dim, int level) {
  Alphabet alphabet(dim);
  if (level < 1) throw std::invalid_argument("level must be at least 1");
  const auto d = static_cast<std::uint64_t>(dim);
  std::uint64_t sig = 0;
  if (dim == 1) {
    sig = static_cast<std::uint64_t>(level);
  } else {
    sig = detail::checked_mul(d, detail::checked_pow(d, level) - 1) / (d - 1);
  }
  std::uint64_t logsig = 0;
  for (int n = 1; n <= level; ++n) logsig += lyndon_count(alphabet, n);
  return {sig, logsig};
}

}  // namespace liesig

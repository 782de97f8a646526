// Shared domain types: context rounds, history bookkeeping, error classes.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace linbandit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid model or instance configuration (non-PD prior, Bernoulli mean outside [0,1], ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

class EmptyBatchError : public Error {
 public:
  using Error::Error;
};

class InvalidActionError : public Error {
 public:
  using Error::Error;
};

/// Harness configuration error; always names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error("config key '" + key + "': " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// ---------------------------------------------------------------------------
// Context vectors and rounds
// ---------------------------------------------------------------------------

/// Throws DimensionError unless x has dimension d >= 1 with finite coordinates.
void check_context(const Eigen::Ref<const Vector>& x, Eigen::Index d);

enum class Group : std::uint8_t { Majority, Minority };
enum class RoundKind : std::uint8_t { A, B, C };

const char* to_string(Group g);
const char* to_string(RoundKind k);

/// The K action slots offered on one round. An unavailable slot is the
/// "no such action" marker; at least one slot must be available.
///
/// Contexts are stored column-wise in a d x K matrix so a round can be
/// refilled in place by the samplers without reallocating.
class ContextRound {
 public:
  ContextRound() = default;
  ContextRound(Eigen::Index dim, std::size_t num_actions);

  /// Resizes to d x K and marks every slot unavailable.
  void reset(Eigen::Index dim, std::size_t num_actions);

  void set(std::size_t action, const Eigen::Ref<const Vector>& x);
  void clear(std::size_t action);

  bool available(std::size_t action) const { return available_.at(action) != 0; }

  /// Context of an available slot; throws InvalidActionError otherwise.
  Matrix::ConstColXpr context(std::size_t action) const;

  /// Copying accessor with the optional-slot semantics.
  std::optional<Vector> slot(std::size_t action) const;

  std::size_t num_actions() const noexcept { return available_.size(); }
  std::size_t num_available() const noexcept;
  Eigen::Index dim() const noexcept { return contexts_.rows(); }

  /// Checks the availability invariants, including the two-bridge pattern
  /// when `kind` is set.
  void validate() const;

  Group group = Group::Majority;
  std::optional<RoundKind> kind;
  std::int64_t round_index = 1;

 private:
  Matrix contexts_;
  std::vector<std::uint8_t> available_;
};

// ---------------------------------------------------------------------------
// History
// ---------------------------------------------------------------------------

/// End of the previous batch for round t under batch size Y: Y * floor((t-1)/Y).
std::int64_t last_batch_end(std::int64_t t, std::int64_t batch_size);

/// Append-only record of (chosen context, reward) pairs, rounds indexed 1..t.
/// Batch b covers rounds (b-1)Y+1 .. min(bY, t).
class History {
 public:
  using RowsMap = Eigen::Map<const RowMatrix>;
  using RewardsMap = Eigen::Map<const Vector>;

  struct Batch {
    RowsMap contexts;  // one row per round
    RewardsMap rewards;
    std::int64_t first_round;
  };

  History(Eigen::Index dim, std::int64_t batch_size);

  void append(const Eigen::Ref<const Vector>& x, double reward);

  std::int64_t size() const noexcept { return static_cast<std::int64_t>(rewards_.size()); }
  std::int64_t batch_size() const noexcept { return batch_size_; }
  Eigen::Index dim() const noexcept { return dim_; }
  std::int64_t num_batches() const noexcept;

  Eigen::Map<const Vector> context(std::int64_t round) const;
  double reward(std::int64_t round) const;

  /// Rows first..last (1-based, inclusive).
  Batch rounds(std::int64_t first, std::int64_t last) const;

  /// Entries of batch b (1-based). Throws EmptyBatchError when the batch has
  /// no recorded round.
  Batch batch_slice(std::int64_t b) const;

 private:
  Eigen::Index dim_;
  std::int64_t batch_size_;
  std::vector<double> coords_;
  std::vector<double> rewards_;
};

}  // namespace linbandit

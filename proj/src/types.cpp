#include "linbandit/types.hpp"

#include <algorithm>

namespace linbandit {

void check_context(const Eigen::Ref<const Vector>& x, Eigen::Index d) {
  if (d < 1) throw DimensionError("context dimension must be >= 1");
  if (x.size() != d) {
    throw DimensionError("context has dimension " + std::to_string(x.size()) + ", expected " +
                         std::to_string(d));
  }
  if (!x.allFinite()) throw DimensionError("context has non-finite coordinates");
}

const char* to_string(Group g) { return g == Group::Majority ? "majority" : "minority"; }

const char* to_string(RoundKind k) {
  switch (k) {
    case RoundKind::A: return "A";
    case RoundKind::B: return "B";
    case RoundKind::C: return "C";
  }
  return "?";
}

ContextRound::ContextRound(Eigen::Index dim, std::size_t num_actions) { reset(dim, num_actions); }

void ContextRound::reset(Eigen::Index dim, std::size_t num_actions) {
  if (contexts_.rows() != dim || contexts_.cols() != static_cast<Eigen::Index>(num_actions)) {
    contexts_.setZero(dim, static_cast<Eigen::Index>(num_actions));
  }
  available_.assign(num_actions, 0);
  kind.reset();
}

void ContextRound::set(std::size_t action, const Eigen::Ref<const Vector>& x) {
  if (action >= available_.size()) throw InvalidActionError("action slot out of range");
  if (x.size() != contexts_.rows()) throw DimensionError("context dimension mismatch");
  contexts_.col(static_cast<Eigen::Index>(action)) = x;
  available_[action] = 1;
}

void ContextRound::clear(std::size_t action) {
  if (action >= available_.size()) throw InvalidActionError("action slot out of range");
  available_[action] = 0;
}

Matrix::ConstColXpr ContextRound::context(std::size_t action) const {
  if (action >= available_.size() || available_[action] == 0) {
    throw InvalidActionError("action " + std::to_string(action) + " is not available");
  }
  return contexts_.col(static_cast<Eigen::Index>(action));
}

std::optional<Vector> ContextRound::slot(std::size_t action) const {
  if (!available(action)) return std::nullopt;
  return Vector(contexts_.col(static_cast<Eigen::Index>(action)));
}

std::size_t ContextRound::num_available() const noexcept {
  return static_cast<std::size_t>(std::count(available_.begin(), available_.end(), 1));
}

void ContextRound::validate() const {
  if (num_available() == 0) throw InvalidActionError("round has no available action");
  for (std::size_t a = 0; a < num_actions(); ++a) {
    if (available(a)) check_context(context(a), dim());
  }
  if (!kind) return;

  const Vector top = Vector::Unit(2, 0);
  const Vector bottom = Vector::Unit(2, 1);
  auto is = [&](std::size_t a, const Vector& v) {
    return available(a) && context(a).isApprox(v);
  };
  bool ok = dim() == 2 && num_actions() == 2;
  if (ok) {
    switch (*kind) {
      case RoundKind::A:  // top bridge only
        ok = is(0, top) && is(1, top);
        break;
      case RoundKind::B:
        ok = is(0, top) && is(1, bottom);
        break;
      case RoundKind::C:  // bottom bridge only
        ok = !available(0) && is(1, bottom);
        break;
    }
  }
  if (!ok) {
    throw InvalidActionError(std::string("availability pattern does not match kind ") +
                             to_string(*kind));
  }
}

std::int64_t last_batch_end(std::int64_t t, std::int64_t batch_size) {
  if (t < 1 || batch_size < 1) throw std::invalid_argument("last_batch_end requires t >= 1, Y >= 1");
  return batch_size * ((t - 1) / batch_size);
}

History::History(Eigen::Index dim, std::int64_t batch_size) : dim_(dim), batch_size_(batch_size) {
  if (dim < 1) throw DimensionError("history dimension must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
}

void History::append(const Eigen::Ref<const Vector>& x, double reward) {
  if (x.size() != dim_) throw DimensionError("history append: dimension mismatch");
  coords_.insert(coords_.end(), x.data(), x.data() + dim_);
  rewards_.push_back(reward);
}

std::int64_t History::num_batches() const noexcept {
  return (size() + batch_size_ - 1) / batch_size_;
}

Eigen::Map<const Vector> History::context(std::int64_t round) const {
  if (round < 1 || round > size()) throw std::out_of_range("history round out of range");
  return Eigen::Map<const Vector>(coords_.data() + (round - 1) * dim_, dim_);
}

double History::reward(std::int64_t round) const {
  if (round < 1 || round > size()) throw std::out_of_range("history round out of range");
  return rewards_[static_cast<std::size_t>(round - 1)];
}

History::Batch History::rounds(std::int64_t first, std::int64_t last) const {
  if (first < 1 || last > size() || first > last + 1) {
    throw std::out_of_range("history round range out of bounds");
  }
  const std::int64_t n = last - first + 1;
  const double* rows = coords_.data() + (first - 1) * dim_;
  const double* rew = rewards_.data() + (first - 1);
  return Batch{RowsMap(rows, n, dim_), RewardsMap(rew, n), first};
}

History::Batch History::batch_slice(std::int64_t b) const {
  if (b < 1 || b > num_batches()) {
    throw EmptyBatchError("batch " + std::to_string(b) + " has no recorded rounds");
  }
  const std::int64_t first = (b - 1) * batch_size_ + 1;
  const std::int64_t last = std::min(b * batch_size_, size());
  return rounds(first, last);
}

}  // namespace linbandit

#include "kslab/ensemble.hpp"

#include <algorithm>
#include <numeric>

#include "kslab/error.hpp"

namespace kslab {

ParticleEnsemble::ParticleEnsemble(int dimension, std::size_t count, double time)
    : dim_(dimension), time_(time), pos_(count * static_cast<std::size_t>(dimension), 0.0),
      ids_(count) {
  if (dimension < 1) throw InvalidArgument("ensemble dimension must be >= 1");
  std::iota(ids_.begin(), ids_.end(), std::uint64_t{0});
}

ParticleEnsemble::ParticleEnsemble(int dimension, std::vector<double> positions, double time)
    : dim_(dimension), time_(time), pos_(std::move(positions)) {
  if (dimension < 1) throw InvalidArgument("ensemble dimension must be >= 1");
  if (pos_.size() % static_cast<std::size_t>(dimension) != 0) {
    throw InvalidArgument("position array length is not a multiple of the dimension");
  }
  ids_.resize(pos_.size() / static_cast<std::size_t>(dimension));
  std::iota(ids_.begin(), ids_.end(), std::uint64_t{0});
}

void ParticleEnsemble::set_ids(std::vector<std::uint64_t> ids) {
  if (ids.size() != ids_.size()) throw InvalidArgument("identity key count mismatch");
  std::vector<std::uint64_t> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("identity keys must be distinct");
  }
  ids_ = std::move(ids);
}

std::vector<std::size_t> ParticleEnsemble::key_order() const {
  std::vector<std::size_t> order(ids_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  bool identity = true;
  for (std::size_t i = 0; i < ids_.size(); ++i) identity = identity && ids_[i] == i;
  if (!identity) {
    std::sort(order.begin(), order.end(),
              [this](std::size_t a, std::size_t b) { return ids_[a] < ids_[b]; });
  }
  return order;
}

}  // namespace kslab

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Dense>

namespace dpdsel {

using Rng = std::mt19937_64;

/// Engine for the substream identified by (seed, keys...). Distinct key tuples
/// give independent streams, so results do not depend on execution order.
Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

/// Stream tags used by the harness.
namespace stream {
inline constexpr std::uint64_t design = 0;
inline constexpr std::uint64_t noise = 1;
inline constexpr std::uint64_t contamination = 2;
inline constexpr std::uint64_t split = 3;
}  // namespace stream

Eigen::MatrixXd standard_normal(Rng& rng, Eigen::Index rows, Eigen::Index cols);

}  // namespace dpdsel

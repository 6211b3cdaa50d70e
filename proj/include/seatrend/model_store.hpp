#pragma once

#include <filesystem>
#include <vector>

#include "seatrend/neuralnet.hpp"

namespace seatrend {

// One trained net plus its normalization, as used for a single cluster.
struct ClusterModel {
    Mlp mlp;
    Scaler scaler;
    std::uint64_t seed = 0;
};

// MDL1 container: magic "MDL1", version u16, model count u32, then per model
// (all integers and doubles little-endian):
//   n_layers u32, layer sizes u32[], dropout_rate f64, dropout_layer u32,
//   seed u64, n_features u32, feature min/max f64 pairs, label min/max f64,
//   weights then biases per layer, f64 row-major.
void write_models(const std::vector<ClusterModel>& models,
                  const std::filesystem::path& path);
std::vector<ClusterModel> read_models(const std::filesystem::path& path);

} // namespace seatrend

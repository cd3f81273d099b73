#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "hgm/nets.hpp"
#include "hgm/schedule.hpp"

namespace hgm {

/// On-disk model container (JSON): architecture descriptor, flat
/// parameters, the training schedule, and the training seed. Doubles are
/// serialized with shortest round-trip formatting, so a reloaded model
/// evaluates bit-exactly.
struct Checkpoint {
    ModelDescriptor descriptor;
    std::vector<double> params;
    NoiseSchedule schedule;
    std::uint64_t train_seed = 0;
};

void save_checkpoint(const std::string& path, const TrainableModel& model,
                     const NoiseSchedule& schedule, std::uint64_t train_seed);

Checkpoint load_checkpoint(const std::string& path);

/// Instantiates the checkpointed architecture and installs its parameters.
std::unique_ptr<TrainableModel> model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace hgm

#include "hgm/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace hgm {

using nlohmann::json;

void save_checkpoint(const std::string& path, const TrainableModel& model,
                     const NoiseSchedule& schedule, std::uint64_t train_seed) {
    const ModelDescriptor desc = model.descriptor();
    json j;
    j["architecture"] = desc.architecture;
    j["height"] = desc.height;
    j["width"] = desc.width;
    j["channels"] = desc.channels;
    j["hidden"] = desc.hidden;
    j["dilations"] = desc.dilations;
    j["params"] = model.params();
    j["schedule"]["sigmas"] = schedule.sigmas;
    j["schedule"]["epsilon"] = schedule.epsilon;
    j["schedule"]["steps_per_level"] = schedule.steps_per_level;
    j["train_seed"] = train_seed;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("load_checkpoint: " + path + ": " + e.what());
    }
    Checkpoint ckpt;
    ckpt.descriptor.architecture = j.at("architecture").get<std::string>();
    ckpt.descriptor.height = j.at("height").get<int>();
    ckpt.descriptor.width = j.at("width").get<int>();
    ckpt.descriptor.channels = j.at("channels").get<int>();
    ckpt.descriptor.hidden = j.at("hidden").get<int>();
    ckpt.descriptor.dilations = j.at("dilations").get<std::vector<int>>();
    ckpt.params = j.at("params").get<std::vector<double>>();
    ckpt.schedule.sigmas = j.at("schedule").at("sigmas").get<std::vector<double>>();
    ckpt.schedule.epsilon = j.at("schedule").at("epsilon").get<double>();
    ckpt.schedule.steps_per_level = j.at("schedule").at("steps_per_level").get<int>();
    ckpt.train_seed = j.at("train_seed").get<std::uint64_t>();
    return ckpt;
}

std::unique_ptr<TrainableModel> model_from_checkpoint(const Checkpoint& ckpt) {
    std::unique_ptr<TrainableModel> model = make_model(ckpt.descriptor);
    if (model->params().size() != ckpt.params.size())
        throw std::runtime_error("model_from_checkpoint: parameter count mismatch");
    model->params() = ckpt.params;
    return model;
}

}  // namespace hgm

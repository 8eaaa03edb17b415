#include "hamstream/thresholds.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace hamstream {

Thresholds builtin_thresholds() { return Thresholds{}; }

Thresholds load_thresholds(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open thresholds file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto j = nlohmann::json::parse(ss.str());
    Thresholds t;
    t.raw_success = j.at("raw_success").get<double>();
    t.end_to_end = j.at("end_to_end").get<double>();
    t.amplified = j.at("amplified").get<double>();
    return t;
}

std::string default_thresholds_path() { return std::string(HAMSTREAM_CONFIG_DIR) + "/thresholds.json"; }

}  // namespace hamstream

#pragma once

#include <fstream>
#include <string>

#include "ddeu/config.hpp"
#include "ddeu/pipeline.hpp"

namespace testing_support {

inline const ddeu::json& expected() {
    static const ddeu::json j = [] {
        std::ifstream in(std::string(DDEU_SOURCE_DIR) + "/expected/expected_results.json");
        return ddeu::json::parse(in);
    }();
    return j;
}

inline const ddeu::RunConfig& shipped() {
    static const ddeu::RunConfig c = ddeu::load_config(std::string(DDEU_SOURCE_DIR) + "/configs/shipped.json");
    return c;
}

// n=512 orbits with spectra, solved once per test binary
inline const ddeu::Registry& registry() {
    static const ddeu::Registry r = ddeu::build_registry(shipped(), shipped().n, 1);
    return r;
}

inline ddeu::Segment seg(int n, double (*fn)(double)) { return ddeu::Segment::from_function(n, fn); }

}  // namespace testing_support

// Runs every acceptance criterion on a config; exit status 1 on any FAIL.

#include <iostream>

#include "ddeu/verify.hpp"

int main(int argc, char** argv) {
    try {
        ddeu::RunConfig cfg = argc > 1 ? ddeu::load_config(argv[1]) : ddeu::config_from_json(ddeu::json::object());
        ddeu::Verifier v(cfg, ddeu::resolve_jobs(cfg));
        int failed = 0;
        for (int id = 1; id <= 12; ++id) {
            const auto r = v.run(id);
            std::cout << ddeu::Verifier::format(r) << std::endl;
            failed += !r.pass;
        }
        std::cout << (failed ? "FAILED " : "ALL PASSED ") << 12 - failed << "/12" << std::endl;
        return failed ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

// Line-oriented oracle server speaking the subprocess model protocol:
// one {"profile":[[...],...]} request per stdin line, one
// {"shape":[...],"mass":[...]} joint per stdout line. Backed by any model the
// library knows; --corrupt skews the answers so conformance tooling can be
// tested against a broken oracle.

#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "discop.h"

int main(int argc, char** argv) {
    CLI::App app{"serve a marginals-to-joint model over stdin/stdout"};
    std::string model_spec = "independence";
    bool corrupt = false;
    app.add_option("--model", model_spec, "model spec (see discop check-ia --model)");
    app.add_flag("--corrupt", corrupt, "shift mass between the first and last cells");
    CLI11_PARSE(app, argc, argv);

    discop_model* model = nullptr;
    if (discop_model_create(model_spec.c_str(), &model) != DISCOP_OK) {
        std::cerr << "error: " << discop_last_error() << '\n';
        return 2;
    }
    std::unique_ptr<discop_model, decltype(&discop_model_free)> guard(model, &discop_model_free);

    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        nlohmann::json request = nlohmann::json::parse(line, nullptr, false);
        if (request.is_discarded() || !request.contains("profile")) {
            std::cerr << "error: malformed request\n";
            return 2;
        }
        discop_profile* profile = nullptr;
        if (discop_profile_parse(request["profile"].dump().c_str(), &profile) != DISCOP_OK) {
            std::cerr << "error: " << discop_last_error() << '\n';
            return 2;
        }
        discop_joint* joint = nullptr;
        const discop_status st = discop_model_query(model, profile, &joint);
        discop_profile_free(profile);
        if (st != DISCOP_OK) {
            std::cerr << "error: " << discop_last_error() << '\n';
            return 2;
        }
        char* payload = nullptr;
        discop_joint_to_json(joint, &payload);
        std::string answer = payload ? payload : "";
        discop_string_free(payload);
        discop_joint_free(joint);
        if (corrupt) {
            nlohmann::json j = nlohmann::json::parse(answer);
            auto& mass = j["mass"];
            if (mass.size() >= 2) {
                mass[0] = mass[0].get<double>() + 2e-4;
                mass[mass.size() - 1] = mass[mass.size() - 1].get<double>() - 2e-4;
            }
            answer = j.dump();
        }
        std::cout << answer << '\n' << std::flush;
    }
    return 0;
}

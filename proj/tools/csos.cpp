#include <chrono>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "csoslab/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"csos: CSOS transfer-matrix laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> suite_override;
    std::string out_dir = ".";
    int jobs = 0;
    auto* run = app.add_subcommand("run", "execute the configured verification suites");
    run->add_option("--config", config_path, "experiment configuration file")->required();
    run->add_option("--suite", suite_override, "restrict to these suites (repeatable)");
    run->add_option("--jobs", jobs, "parallel suite jobs");
    run->add_option("--out", out_dir, "output directory for report files");

    std::string identity;
    auto* explain = app.add_subcommand("explain", "describe a registered identity");
    explain->add_option("identity", identity, "registry name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (explain->parsed()) {
        const csos::IdentityInfo* info = csos::find_identity(identity);
        if (!info) {
            std::cerr << "unknown identity: " << identity << "\n";
            std::cerr << "known identities:";
            for (const auto& e : csos::identity_registry()) std::cerr << " " << e.name;
            std::cerr << "\n";
            return 2;
        }
        std::cout << info->name << "\n  statement: " << info->statement
                  << "\n  validates: " << info->anchor << "\n  test parameters: " << info->params
                  << "\n";
        return 0;
    }

    try {
        csos::ExperimentConfig cfg = csos::ExperimentConfig::parse_file(config_path);
        if (!suite_override.empty()) {
            cfg.suites = suite_override;
            cfg.validate();
        }
        if (jobs > 0) cfg.jobs = jobs;
        auto t0 = std::chrono::steady_clock::now();
        csos::RunReport rep = csos::run_suites(cfg);
        auto t1 = std::chrono::steady_clock::now();
        std::filesystem::create_directories(out_dir);
        csos::write_json_report(rep, out_dir + "/report.json");
        csos::write_degeneracy_table(rep, out_dir + "/degeneracy.tsv");
        csos::print_human_report(rep, std::cout);
        std::cout << "wall time: "
                  << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
                  << " ms\n";
        return rep.n_fail == 0 ? 0 : 1;
    } catch (const csos::DimensionCapError& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 3;
    } catch (const csos::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

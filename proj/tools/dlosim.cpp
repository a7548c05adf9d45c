// Command-line front end: run scenario simulations, compare integrator
// timing, study resolution errors, and search for the largest stable step.
#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dlo/config_io.hpp"
#include "dlo/harness.hpp"
#include "dlo/simulation.hpp"

namespace {

std::vector<std::string> splitList(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parseScalarList(const std::string& csv) {
    std::vector<double> out;
    for (const auto& item : splitList(csv)) out.push_back(std::stod(item));
    return out;
}

std::vector<dlo::Index> parseIndexList(const std::string& csv) {
    std::vector<dlo::Index> out;
    for (const auto& item : splitList(csv)) out.push_back(std::stol(item));
    return out;
}

void emit(const std::string& text, const std::string& outPath) {
    std::cout << text;
    if (!outPath.empty()) dlo::writeTextFile(outPath, text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic-spline simulation of deformable linear objects"};
    app.require_subcommand(1);

    std::string configPath, outPath;
    std::string integratorsCsv = "symplectic4,rk4,zhai";
    std::string durationsCsv = "1,5,10";
    std::string nuCsv, nsCsv, integratorName = "symplectic4";
    int repetitions = 3;
    double energyTolerance = 3e-3;
    double maxTau = 1.0;

    auto* simulate = app.add_subcommand("simulate", "run one simulation, write trajectory");
    simulate->add_option("config", configPath, "config file")->required();
    simulate->add_option("--out", outPath, "trajectory output path")->required();

    auto* bench = app.add_subcommand("benchmark", "time integrators over durations");
    bench->add_option("config", configPath, "config file")->required();
    bench->add_option("--integrators", integratorsCsv, "comma list (default all three)");
    bench->add_option("--durations", durationsCsv, "comma list of seconds");
    bench->add_option("--reps", repetitions, "timing repetitions per cell");
    bench->add_option("--out", outPath, "report output path");

    auto* study = app.add_subcommand("error-study",
                                     "position error of coarser resolutions vs the config");
    study->add_option("config", configPath, "reference config (largest n_u, n_s)")->required();
    study->add_option("--nu", nuCsv, "comma list of control-point counts")->required();
    study->add_option("--ns", nsCsv, "comma list of sample counts")->required();
    study->add_option("--reps", repetitions, "timing repetitions per cell");
    study->add_option("--out", outPath, "report output path");

    auto* stable = app.add_subcommand("max-stable-tau", "largest stable step-size search");
    stable->add_option("config", configPath, "config file")->required();
    stable->add_option("--integrator", integratorName, "symplectic4 | rk4 | zhai");
    stable->add_option("--tolerance", energyTolerance, "stability energy tolerance");
    stable->add_option("--max-tau", maxTau, "search cap, seconds");
    stable->add_option("--out", outPath, "report output path");

    CLI11_PARSE(app, argc, argv);

    try {
        const dlo::SimulationConfig config = dlo::loadConfig(configPath);

        if (simulate->parsed()) {
            const dlo::Trajectory traj = dlo::runSimulation(config);
            dlo::exportTrajectory(traj, outPath);
            std::cout << "outcome: " << dlo::outcomeName(traj.outcome);
            if (traj.outcome == dlo::RunOutcome::Unstable)
                std::cout << " at step " << traj.unstableStep << " (t = "
                          << traj.unstableTime << " s)";
            std::cout << "\nsteps: " << traj.totalSteps
                      << ", force evaluations: " << traj.totalForceEvals
                      << ", stepping wall seconds: " << traj.wallSeconds << "\n";
            if (traj.outcome == dlo::RunOutcome::Completed && traj.records.size() >= 10) {
                std::cout << "energy drift:\n"
                          << dlo::formatDriftReport(dlo::energyDriftReport(traj));
            }
            std::cout << "trajectory written to " << outPath << "\n";
        } else if (bench->parsed()) {
            std::vector<dlo::IntegratorKind> kinds;
            for (const auto& name : splitList(integratorsCsv))
                kinds.push_back(dlo::parseIntegratorKind(name));
            dlo::BenchmarkOptions options;
            options.repetitions = repetitions;
            const auto report =
                dlo::benchmark(config, kinds, parseScalarList(durationsCsv), options);
            emit(dlo::formatBenchmarkReport(report), outPath);
        } else if (study->parsed()) {
            dlo::ErrorStudyOptions options;
            options.timingRepetitions = repetitions;
            const auto report = dlo::resolutionErrorStudy(config, parseIndexList(nuCsv),
                                                          parseIndexList(nsCsv), options);
            emit(dlo::formatErrorStudyReport(report), outPath);
        } else if (stable->parsed()) {
            dlo::MaxStableTauOptions options;
            options.energyTolerance = energyTolerance;
            options.maxTau = maxTau;
            const auto report =
                dlo::maxStableTau(config, dlo::parseIntegratorKind(integratorName), options);
            emit(dlo::formatMaxStableTauReport(report, config), outPath);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

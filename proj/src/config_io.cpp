#include "dlo/config_io.hpp"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace dlo {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

Scalar toScalar(const std::string& value, const std::string& context) {
    try {
        size_t used = 0;
        const Scalar v = std::stod(value, &used);
        if (trim(value.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw std::runtime_error(context + ": expected a number, got '" + value + "'");
}

Index toIndex(const std::string& value, const std::string& context) {
    const Scalar v = toScalar(value, context);
    const auto i = static_cast<Index>(v);
    if (Scalar(i) != v) throw std::runtime_error(context + ": expected an integer");
    return i;
}

Vec3 toVec3(const std::string& value, const std::string& context) {
    std::istringstream in(value);
    Vec3 v;
    if (!(in >> v[0] >> v[1] >> v[2]))
        throw std::runtime_error(context + ": expected three numbers");
    std::string rest;
    if (in >> rest) throw std::runtime_error(context + ": trailing content '" + rest + "'");
    return v;
}

std::string scalarText(Scalar v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

std::string vec3Text(const Vec3& v) {
    return scalarText(v[0]) + " " + scalarText(v[1]) + " " + scalarText(v[2]);
}

constexpr const char* kUnpublishedFlag = "  # implementation-chosen; no published value";

}  // namespace

SimulationConfig parseConfig(std::istream& in, const std::string& label) {
    SimulationConfig config;
    ForceSchedule force;
    bool forceKeySet = false, applyUSet = false;

    std::string line, section;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = label + ":" + std::to_string(lineNo);
        if (line.front() == '[') {
            if (line.back() != ']') throw std::runtime_error(where + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "simulation" && section != "properties" && section != "scenario")
                throw std::runtime_error(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string context = where + " (" + key + ")";

        if (section == "simulation") {
            if (key == "n_u") config.controlCount = toIndex(value, context);
            else if (key == "n_s") config.sampleCount = toIndex(value, context);
            else if (key == "duration") config.duration = toScalar(value, context);
            else if (key == "tau") config.step.tau = toScalar(value, context);
            else if (key == "integrator") config.step.kind = parseIntegratorKind(value);
            else if (key == "record_stride") config.recordStride = toIndex(value, context);
            else if (key == "zhai_psi") config.step.zhaiPsi = toScalar(value, context);
            else if (key == "zhai_phi") config.step.zhaiPhi = toScalar(value, context);
            else throw std::runtime_error(context + ": unknown key");
        } else if (section == "properties") {
            if (key == "length") config.properties.length = toScalar(value, context);
            else if (key == "diameter") config.properties.diameter = toScalar(value, context);
            else if (key == "young_modulus")
                config.properties.youngModulus = toScalar(value, context);
            else if (key == "shear_modulus")
                config.properties.shearModulus = toScalar(value, context);
            else if (key == "density") config.properties.density = toScalar(value, context);
            else throw std::runtime_error(context + ": unknown key");
        } else if (section == "scenario") {
            if (key == "kind") config.scenarioKind = parseScenarioKind(value);
            else if (key == "gravity") config.gravity = toVec3(value, context);
            else if (key == "spring_stiffness")
                config.springStiffness = toScalar(value, context);
            else if (key == "force_amplitude") {
                force.amplitude = toScalar(value, context);
                forceKeySet = true;
            } else if (key == "force_frequency") {
                force.frequency = toScalar(value, context);
                forceKeySet = true;
            } else if (key == "force_direction") {
                force.direction = toVec3(value, context);
                forceKeySet = true;
            } else if (key == "force_apply_u") {
                force.applyU = toScalar(value, context);
                forceKeySet = applyUSet = true;
            } else {
                throw std::runtime_error(context + ": unknown key");
            }
        } else {
            throw std::runtime_error(where + ": key outside any section");
        }
    }

    if (forceKeySet && config.scenarioKind == ScenarioKind::SinusoidalCenter) {
        if (!applyUSet) force.applyU = config.properties.length / 2;
        config.forceOverride = force;
    }
    config.validate();
    return config;
}

SimulationConfig loadConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parseConfig(in, path);
}

std::string formatConfig(const SimulationConfig& config) {
    const Scenario scenario = config.makeScenario();
    std::ostringstream out;
    out << "[simulation]\n";
    out << "n_u = " << config.controlCount << "\n";
    out << "n_s = " << config.sampleCount << "\n";
    out << "duration = " << scalarText(config.duration) << "\n";
    out << "tau = " << scalarText(config.step.tau) << "\n";
    out << "integrator = " << integratorKindName(config.step.kind) << "\n";
    out << "record_stride = " << config.recordStride << kUnpublishedFlag << "\n";
    if (config.step.kind == IntegratorKind::Zhai) {
        out << "zhai_psi = " << scalarText(config.step.zhaiPsi) << kUnpublishedFlag << "\n";
        out << "zhai_phi = " << scalarText(config.step.zhaiPhi) << kUnpublishedFlag << "\n";
    }
    out << "\n[properties]\n";
    out << "length = " << scalarText(config.properties.length) << "\n";
    out << "diameter = " << scalarText(config.properties.diameter) << "\n";
    out << "young_modulus = " << scalarText(config.properties.youngModulus)
        << kUnpublishedFlag << "\n";
    out << "shear_modulus = " << scalarText(config.properties.shearModulus)
        << kUnpublishedFlag << "\n";
    out << "density = " << scalarText(config.properties.density) << kUnpublishedFlag << "\n";
    out << "\n[scenario]\n";
    out << "kind = " << scenarioKindName(config.scenarioKind) << "\n";
    out << "gravity = " << vec3Text(config.gravity) << kUnpublishedFlag << "\n";
    out << "spring_stiffness = " << scalarText(config.springStiffness) << "\n";
    if (scenario.externalForce) {
        const auto& f = *scenario.externalForce;
        out << "force_amplitude = " << scalarText(f.amplitude) << kUnpublishedFlag << "\n";
        out << "force_frequency = " << scalarText(f.frequency) << kUnpublishedFlag << "\n";
        out << "force_direction = " << vec3Text(f.direction) << kUnpublishedFlag << "\n";
        out << "force_apply_u = " << scalarText(f.applyU) << "\n";
    }
    return out.str();
}

std::string formatTrajectory(const Trajectory& trajectory) {
    const Index nu = trajectory.config.controlCount;
    std::ostringstream out;
    out << std::setprecision(17);
    out << "# trajectory\n";
    std::istringstream cfg(formatConfig(trajectory.config));
    std::string line;
    while (std::getline(cfg, line)) out << "# " << line << "\n";

    static constexpr const char* comp[] = {"x", "y", "z", "th"};
    out << "t,energy";
    for (int c = 0; c < kComponents; ++c)
        for (Index i = 0; i < nu; ++i) out << "," << comp[c] << i;
    out << "\n";

    for (const auto& rec : trajectory.records) {
        out << rec.t << "," << rec.energy;
        const auto flat = flatView(rec.ctrl);
        for (Index i = 0; i < flat.size(); ++i) out << "," << flat[i];
        out << "\n";
    }
    if (trajectory.outcome == RunOutcome::Unstable)
        out << "unstable step=" << trajectory.unstableStep << " t="
            << trajectory.unstableTime << "\n";
    else
        out << "completed\n";
    return out.str();
}

void exportTrajectory(const Trajectory& trajectory, const std::string& path) {
    writeTextFile(path, formatTrajectory(trajectory));
}

ParsedTrajectory parseTrajectory(std::istream& in) {
    ParsedTrajectory parsed;
    std::string line;
    std::vector<std::vector<Scalar>> rows;
    bool haveHeader = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (!haveHeader) {
            std::istringstream h(line);
            std::string name;
            while (std::getline(h, name, ',')) parsed.columns.push_back(name);
            haveHeader = true;
            continue;
        }
        if (!line.empty() && !std::isdigit(static_cast<unsigned char>(line.front())) &&
            line.front() != '-' && line.front() != '+' && line.front() != '.') {
            parsed.outcomeLine = line;
            break;
        }
        std::istringstream row(line);
        std::vector<Scalar> values;
        std::string cell;
        while (std::getline(row, cell, ',')) values.push_back(toScalar(cell, "trajectory row"));
        if (values.size() != parsed.columns.size())
            throw std::runtime_error("trajectory row width does not match header");
        rows.push_back(std::move(values));
    }
    parsed.rows.resize(static_cast<Index>(rows.size()),
                       static_cast<Index>(parsed.columns.size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c)
            parsed.rows(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return parsed;
}

std::string formatBenchmarkReport(const BenchmarkReport& report) {
    std::ostringstream out;
    out << "== integrator timing ==\n";
    out << "machine: " << report.machine << "\n";
    out << "cells: wall-clock seconds of the stepping loop (median over repetitions)\n\n";
    out << "integrator   duration_s   wall_s       outcome     force_evals\n";
    for (const auto& c : report.cells) {
        std::ostringstream wall;
        wall << std::setprecision(6) << c.wallSeconds;
        out << std::left << std::setw(13) << integratorKindName(c.integrator)
            << std::setw(13) << c.duration << std::setw(13) << wall.str() << std::setw(12)
            << outcomeName(c.outcome) << c.forceEvals << "\n";
    }
    out << "\n[data]\n";
    out << "machine = " << report.machine << "\n";
    out << std::setprecision(17);
    for (size_t i = 0; i < report.cells.size(); ++i) {
        const auto& c = report.cells[i];
        const std::string p = "cell." + std::to_string(i) + ".";
        out << p << "integrator = " << integratorKindName(c.integrator) << "\n";
        out << p << "duration = " << c.duration << "\n";
        out << p << "wall_seconds = " << c.wallSeconds << "\n";
        out << p << "outcome = " << outcomeName(c.outcome) << "\n";
        out << p << "force_evals = " << c.forceEvals << "\n";
        out << p << "steps = " << c.steps << "\n";
    }
    for (size_t i = 0; i < report.symplecticOverRk4.size(); ++i)
        out << "ratio.symplectic4_over_rk4." << i << " = " << report.symplecticOverRk4[i]
            << "\n";
    return out.str();
}

std::string formatErrorStudyReport(const ErrorStudyReport& report) {
    std::ostringstream out;
    out << "== resolution error study ==\n";
    out << "machine: " << report.machine << "\n";
    out << "reference: n_u = " << report.referenceConfig.controlCount
        << ", n_s = " << report.referenceConfig.sampleCount << "\n";
    out << "position error vs the reference at " << kErrorStudyStations
        << " stations over " << kErrorStudyTimeBins << " time bins\n\n";

    out << "mean error [m] by resolution (rows n_u, columns n_s):\n      ";
    for (Index ns : report.sampleCounts) out << std::setw(12) << ns;
    out << "\n";
    out << std::setprecision(5);
    for (Index i = 0; i < static_cast<Index>(report.controlCounts.size()); ++i) {
        out << std::setw(6) << report.controlCounts[static_cast<size_t>(i)];
        for (Index j = 0; j < static_cast<Index>(report.sampleCounts.size()); ++j)
            out << std::setw(12) << report.meanErrorByResolution(i, j);
        out << "\n";
    }
    out << "\nwall seconds by resolution (rows n_u, columns n_s):\n      ";
    for (Index ns : report.sampleCounts) out << std::setw(12) << ns;
    out << "\n";
    for (Index i = 0; i < static_cast<Index>(report.controlCounts.size()); ++i) {
        out << std::setw(6) << report.controlCounts[static_cast<size_t>(i)];
        for (Index j = 0; j < static_cast<Index>(report.sampleCounts.size()); ++j)
            out << std::setw(12) << report.wallSecondsByResolution(i, j);
        out << "\n";
    }

    out << "\n[data]\n" << std::setprecision(17);
    out << "machine = " << report.machine << "\n";
    out << "reference.n_u = " << report.referenceConfig.controlCount << "\n";
    out << "reference.n_s = " << report.referenceConfig.sampleCount << "\n";
    for (Index s = 0; s < report.stationParameters.size(); ++s)
        out << "station." << s << ".u = " << report.stationParameters[s] << "\n";
    for (const auto& v : report.variants) {
        const std::string p =
            "variant." + std::to_string(v.controlCount) + "." + std::to_string(v.sampleCount);
        out << p << ".unstable = " << (v.unstable ? 1 : 0) << "\n";
        if (v.unstable) continue;
        out << p << ".mean_error = " << v.meanError << "\n";
        out << p << ".wall_seconds = " << v.wallSeconds << "\n";
        for (Index s = 0; s < v.errorVsStation.size(); ++s)
            out << p << ".error_vs_u." << s << " = " << v.errorVsStation[s] << "\n";
        for (Index b = 0; b < v.errorVsTime.size(); ++b)
            out << p << ".error_vs_t." << b << " = " << v.errorVsTime[b] << "\n";
    }
    for (Index i = 0; i < report.errorVsControlCount.size(); ++i)
        out << "error_vs_n_u." << report.controlCounts[static_cast<size_t>(i)] << " = "
            << report.errorVsControlCount[i] << "\n";
    for (Index j = 0; j < report.errorVsSampleCount.size(); ++j)
        out << "error_vs_n_s." << report.sampleCounts[static_cast<size_t>(j)] << " = "
            << report.errorVsSampleCount[j] << "\n";
    return out.str();
}

std::string formatMaxStableTauReport(const MaxStableTauReport& report,
                                     const SimulationConfig& config) {
    std::ostringstream out;
    out << "== largest stable step size ==\n";
    out << "integrator: " << integratorKindName(report.integrator) << "\n";
    out << "scenario: " << scenarioKindName(config.scenarioKind) << ", duration "
        << config.duration << " s\n";
    out << std::setprecision(6);
    out << "max stable tau: " << report.maxStableTau << " s\n";
    if (report.smallestUnstableTau > 0)
        out << "smallest unstable tau probed: " << report.smallestUnstableTau << " s\n";
    out << "\nprobes (tau, outcome, max |energy deviation| / scale):\n";
    for (const auto& p : report.probes)
        out << "  " << std::setw(12) << p.tau << "  "
            << (p.stable ? "stable  " : "unstable") << "  " << outcomeName(p.outcome)
            << "  " << p.maxRelDeviation << "\n";
    out << "\n[data]\n" << std::setprecision(17);
    out << "integrator = " << integratorKindName(report.integrator) << "\n";
    out << "max_stable_tau = " << report.maxStableTau << "\n";
    out << "smallest_unstable_tau = " << report.smallestUnstableTau << "\n";
    return out.str();
}

std::string formatDriftReport(const EnergyDriftReport& report) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "verdict = " << verdictName(report.verdict) << "\n";
    out << "max_abs_deviation = " << report.maxAbsDeviation << "\n";
    out << "max_rel_deviation = " << report.maxRelDeviation << "\n";
    out << "energy_scale = " << report.scale << "\n";
    out << "slope = " << report.slope << "\n";
    out << "slope_sigma = " << report.slopeSigma << "\n";
    return out.str();
}

void writeTextFile(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace dlo

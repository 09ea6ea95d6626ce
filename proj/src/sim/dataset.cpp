#include "knodest/sim/dataset.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "knodest/models/integrators.hpp"

namespace knodest::sim {

Dataset simulate_truth(const Scenario& scenario) {
    const int n = scenario.state_dim();
    const int m = scenario.meas_dim();
    const int m_count = scenario.sample_count;

    std::mt19937_64 rng(scenario.noise.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto draw = [&](const Vec& sigmas) {
        Vec w(sigmas.size());
        for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = sigmas(i) * gauss(rng);
        return w;
    };

    Dataset ds;
    ds.scenario_id = scenario.id;
    ds.fingerprint = scenario.fingerprint();
    ds.seed = scenario.noise.seed;
    ds.dt = scenario.dt;
    ds.times.resize(m_count);
    ds.measurements.resize(m_count);
    ds.inputs.resize(m_count);
    ds.true_states.resize(m_count);

    Vec x = scenario.initial_state;
    for (int i = 0; i < m_count; ++i) {
        const double t = i * scenario.dt;
        const Vec u = control_profile(scenario, t);
        ds.times[i] = t;
        ds.inputs[i] = u;
        ds.true_states[i] = x;
        Vec y = scenario.measurement->eval(x, u);
        if (m > 0) y += draw(scenario.noise.meas_sigmas);
        ds.measurements[i] = std::move(y);

        if (i + 1 < m_count) {
            try {
                x = models::rk45_integrate(
                    *scenario.true_field, x, [&u](double) { return u; }, t, t + scenario.dt,
                    1e-9, 1e-12);
            } catch (const IntegrationError& e) {
                throw IntegrationError(std::string(e.what()) + " (sample " + std::to_string(i) +
                                       ")");
            }
            if (n > 0) x += draw(scenario.noise.state_sigmas);
        }
    }
    return ds;
}

Dataset simulate_truth(const Scenario& scenario, std::uint64_t seed_override) {
    Scenario sc = scenario;
    sc.noise.seed = seed_override;
    return simulate_truth(sc);
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("save_dataset: cannot open " + path);
    const int m = ds.count() ? static_cast<int>(ds.measurements[0].size()) : 0;
    const int p = ds.count() ? static_cast<int>(ds.inputs[0].size()) : 0;
    const int n = ds.count() ? static_cast<int>(ds.true_states[0].size()) : 0;

    std::fprintf(f, "# knodest-dataset v1\n");
    std::fprintf(f, "# scenario %s\n", ds.scenario_id.c_str());
    std::fprintf(f, "# fingerprint %s\n", ds.fingerprint.c_str());
    std::fprintf(f, "# seed %" PRIu64 "\n", ds.seed);
    std::fprintf(f, "# dt %.17g\n", ds.dt);
    std::fprintf(f, "# M %d\n", ds.count());
    std::fprintf(f, "t");
    for (int j = 0; j < m; ++j) std::fprintf(f, ",y_%d", j + 1);
    for (int j = 0; j < p; ++j) std::fprintf(f, ",u_%d", j + 1);
    for (int j = 0; j < n; ++j) std::fprintf(f, ",x_%d", j + 1);
    std::fprintf(f, "\n");
    for (int i = 0; i < ds.count(); ++i) {
        std::fprintf(f, "%.17g", ds.times[i]);
        for (int j = 0; j < m; ++j) std::fprintf(f, ",%.17g", ds.measurements[i](j));
        for (int j = 0; j < p; ++j) std::fprintf(f, ",%.17g", ds.inputs[i](j));
        for (int j = 0; j < n; ++j) std::fprintf(f, ",%.17g", ds.true_states[i](j));
        std::fprintf(f, "\n");
    }
    if (std::ferror(f)) {
        std::fclose(f);
        throw Error("save_dataset: write failed for " + path);
    }
    std::fclose(f);
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line_no, const std::string& what) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_dataset: cannot open " + path);

    Dataset ds;
    std::string line;
    int line_no = 0;
    int declared_m = -1;

    // Preamble: "# key value..." comment lines until the header row.
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] != '#') break;
        std::istringstream ls(line.substr(1));
        std::string key;
        ls >> key;
        if (key == "scenario") {
            ls >> ds.scenario_id;
        } else if (key == "fingerprint") {
            std::string rest;
            std::getline(ls, rest);
            const auto at = rest.find_first_not_of(' ');
            ds.fingerprint = at == std::string::npos ? "" : rest.substr(at);
        } else if (key == "seed") {
            ls >> ds.seed;
        } else if (key == "dt") {
            ls >> ds.dt;
        } else if (key == "M") {
            ls >> declared_m;
        }
        // unknown preamble keys are ignored (forward compatibility)
    }
    if (line.empty() || line[0] == '#') parse_fail(path, line_no, "missing header row");

    int m = 0, p = 0, n = 0;
    {
        std::istringstream ls(line);
        std::string col;
        if (!std::getline(ls, col, ',') || col != "t") {
            parse_fail(path, line_no, "header row must start with t");
        }
        while (std::getline(ls, col, ',')) {
            if (col.rfind("y_", 0) == 0) {
                ++m;
            } else if (col.rfind("u_", 0) == 0) {
                ++p;
            } else if (col.rfind("x_", 0) == 0) {
                ++n;
            } else {
                parse_fail(path, line_no, "unknown column " + col);
            }
        }
    }

    const int cols = 1 + m + p + n;
    std::vector<double> row(cols);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        int got = 0;
        while (std::getline(ls, cell, ',')) {
            if (got < cols) {
                std::size_t used = 0;
                try {
                    row[got] = std::stod(cell, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used == 0) {
                    parse_fail(path, line_no, "bad number in column " + std::to_string(got + 1));
                }
            }
            ++got;
        }
        if (got != cols) {
            parse_fail(path, line_no, "expected " + std::to_string(cols) + " columns, got " +
                                          std::to_string(got));
        }
        ds.times.push_back(row[0]);
        ds.measurements.emplace_back(Eigen::Map<const Vec>(row.data() + 1, m));
        ds.inputs.emplace_back(Eigen::Map<const Vec>(row.data() + 1 + m, p));
        ds.true_states.emplace_back(Eigen::Map<const Vec>(row.data() + 1 + m + p, n));
    }
    if (declared_m >= 0 && declared_m != ds.count()) {
        parse_fail(path, line_no,
                   "preamble declares M=" + std::to_string(declared_m) + " but file has " +
                       std::to_string(ds.count()) + " rows");
    }
    if (ds.count() == 0) parse_fail(path, line_no, "no data rows");
    return ds;
}

Dataset load_dataset(const std::string& path, const std::string& expected_fingerprint) {
    Dataset ds = load_dataset(path);
    if (ds.fingerprint != expected_fingerprint) {
        throw ParseError("load_dataset: fingerprint mismatch for " + path + ": expected \"" +
                         expected_fingerprint + "\", found \"" + ds.fingerprint + "\"");
    }
    return ds;
}

}  // namespace knodest::sim

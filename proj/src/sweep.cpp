#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

#include "qvel/amplitude.hpp"
#include "qvel/errors.hpp"
#include "qvel/harness.hpp"
#include "qvel/spectral.hpp"

namespace qvel {

namespace {

constexpr std::size_t kMaxPoints = 10000;

void apply(SystemParams& p, const std::string& name, double v) {
    if (name == "lambda") p.lambda = v;
    else if (name == "mu") p.mu = v;
    else if (name == "theta") p.theta = v;
    else if (name == "n_queues") p.n_queues = int(std::lround(v));
    else if (name == "delta") p.delta = v;
    else if (name == "delay") p.delay = v;
}

SweepRow evaluate(SystemParams p, const std::vector<std::pair<std::string, double>>& coords, const RunConfig& cfg) {
    SweepRow row;
    std::optional<double> offset;
    for (const auto& [name, v] : coords) {
        if (name == "delay_offset") offset = v;
        else apply(p, name, v);
    }
    row.params = p;
    try {
        p.validate();
        row.region = std::string(to_string(classify_region(p)));
        row.omega_cr = omega_cr(p);
        if (row.omega_cr) row.delta_cr0 = delta_cr(p, 0);
        if (offset) {
            if (!row.delta_cr0) throw UnsupportedRegime("delay_offset needs a critical delay");
            p.delay = *row.delta_cr0 + *offset;
            row.params = p;
            p.validate();
        }
        if (row.omega_cr && p.n_queues == 2 && p.delta * p.mu < 1.0) {
            const auto est = second_order_amplitude(p);
            row.amp_o1 = est.first_order;
            row.amp_o2 = est.second_order;
        }
        if (cfg.sweep.simulate) {
            auto traj = integrate(p, history_from(cfg.simulate, p), {cfg.simulate.horizon, cfg.simulate.steps_per_delay});
            row.amp_sim = measure(traj, cfg.simulate.window_fraction).amplitude;
        }
    } catch (const Error& e) {
        row.error = std::string(e.kind()) + ": " + e.what();
    }
    return row;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::vector<SweepRow> run_sweep(const RunConfig& cfg, int threads) {
    const auto& axes = cfg.sweep.axes;
    if (axes.empty()) throw ConfigError("sweep: no axes given");
    std::size_t total = 1;
    for (const auto& a : axes) {
        if (a.values.empty()) throw ConfigError("sweep: axis '" + a.name + "' is empty");
        total *= a.values.size();
        if (total > kMaxPoints) throw ConfigError("sweep: more than 10000 grid points");
    }

    std::vector<SweepRow> rows(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            // decode i with the last axis varying fastest
            std::vector<std::pair<std::string, double>> coords(axes.size());
            std::size_t rest = i;
            for (std::size_t a = axes.size(); a-- > 0;) {
                coords[a] = {axes[a].name, axes[a].values[rest % axes[a].values.size()]};
                rest /= axes[a].values.size();
            }
            rows[i] = evaluate(cfg.params, coords, cfg);
        }
    };
    const int width = std::clamp(threads, 1, 256);
    std::vector<std::thread> pool;
    for (int t = 1; t < width; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "lambda,mu,theta,n_queues,delta,delay,region,omega_cr,delta_cr0,amp_sim,amp_o1,amp_o2,error\n";
    for (const auto& r : rows) {
        const auto& p = r.params;
        os << format_double(p.lambda) << ',' << format_double(p.mu) << ',' << format_double(p.theta) << ','
           << p.n_queues << ',' << format_double(p.delta) << ',' << format_double(p.delay) << ',' << r.region << ','
           << opt(r.omega_cr) << ',' << opt(r.delta_cr0) << ',' << opt(r.amp_sim) << ',' << opt(r.amp_o1) << ','
           << opt(r.amp_o2) << ',' << csv_field(r.error) << '\n';
    }
}

json sweep_json(const std::vector<SweepRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        json row = {{"params", to_json(r.params)}, {"region", r.region}};
        if (r.omega_cr) row["omega_cr"] = *r.omega_cr;
        if (r.delta_cr0) row["delta_cr0"] = *r.delta_cr0;
        if (r.amp_sim) row["amp_sim"] = *r.amp_sim;
        if (r.amp_o1) row["amp_o1"] = *r.amp_o1;
        if (r.amp_o2) row["amp_o2"] = *r.amp_o2;
        if (!r.error.empty()) row["error"] = r.error;
        out.push_back(row);
    }
    return out;
}

}  // namespace qvel

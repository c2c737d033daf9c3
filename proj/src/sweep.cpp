#include "cgtomo/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>

#include "cgtomo/decoherence.hpp"
#include "cgtomo/metrics.hpp"
#include "cgtomo/reconstruct_direct.hpp"

namespace cgtomo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t cell_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return splitmix64(base ^ splitmix64(a * 0x100000001b3ULL + b));
}

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string input_label(const SingleInput& in) {
    return "n=" + fmt_double(in.nbar) + " r=" + fmt_double(in.r);
}

void run_cells(int n_cells, int threads, const std::function<void(int)>& work) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n_cells));
    if (threads == 1) {
        for (int i = 0; i < n_cells; ++i) work(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n_cells; i = next.fetch_add(1)) work(i);
        });
    }
    for (auto& th : pool) th.join();
}

void guard_cell(SweepRecord& rec, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
}

std::vector<SingleInput> inputs_or_default(const SweepConfig& cfg) {
    if (!cfg.inputs.empty()) return cfg.inputs;
    return {{0.0, 1.0}, {1.0, 1.0}, {0.0, 2.0}};
}

std::vector<double> grid_or_default(const SweepConfig& cfg) {
    if (!cfg.sigma_grid.empty()) {
        for (double s : cfg.sigma_grid)
            if (!(s > 0.0)) throw std::invalid_argument("sigma_grid values must be > 0");
        return cfg.sigma_grid;
    }
    return default_sigma_grid();
}

}  // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::DirectKnown: return "direct_known";
        case Method::DirectUnknown: return "direct_unknown";
        case Method::Mle: return "mle";
    }
    return "?";
}

std::vector<double> default_sigma_grid() {
    std::vector<double> grid;
    const double lo = std::log10(0.01), hi = std::log10(2.0);
    for (int i = 0; i < 40; ++i)
        grid.push_back(std::pow(10.0, lo + (hi - lo) * i / 39.0));
    grid.push_back(0.1);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               grid.end());
    return grid;
}

SweepConfig config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    SweepConfig cfg;
    try {
        if (j.contains("experiment")) cfg.experiment = j["experiment"].get<std::string>();
        if (j.contains("sigma_grid")) cfg.sigma_grid = j["sigma_grid"].get<std::vector<double>>();
        if (j.contains("inputs")) {
            for (const auto& item : j["inputs"])
                cfg.inputs.push_back(
                    SingleInput{item.at("nbar").get<double>(), item.at("r").get<double>()});
        }
        if (j.contains("input_phi")) cfg.input_phi = j["input_phi"].get<double>();
        if (j.contains("frame_grid")) cfg.frame_grid = j["frame_grid"].get<int>();
        if (j.contains("fig2c_phi_grid")) cfg.fig2c_phi_grid = j["fig2c_phi_grid"].get<int>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
        if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
        if (j.contains("mle")) {
            const auto& m = j["mle"];
            if (m.contains("angle_count")) cfg.mle.angle_count = m["angle_count"].get<int>();
            if (m.contains("pair_grid")) cfg.mle.pair_grid = m["pair_grid"].get<int>();
            if (m.contains("restarts")) cfg.mle.restarts = m["restarts"].get<int>();
            if (m.contains("tol")) cfg.mle.tol = m["tol"].get<double>();
            if (m.contains("max_iters")) cfg.mle.max_iters = m["max_iters"].get<int>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return cfg;
}

std::vector<SweepRecord> run_fig2c(const SweepConfig& cfg) {
    const std::vector<double> sigmas = grid_or_default(cfg);
    const SingleInput in = cfg.inputs.empty() ? SingleInput{0.0, 1.0} : cfg.inputs.front();
    const int pg = cfg.fig2c_phi_grid;
    if (pg < 2) throw std::invalid_argument("fig2c_phi_grid must be >= 2");

    std::vector<SweepRecord> records(sigmas.size() * pg);
    run_cells(static_cast<int>(records.size()), cfg.threads, [&](int idx) {
        const int si = idx / pg, pi = idx % pg;
        const double sigma = sigmas[si];
        const double phi = pi * kPi / pg;
        SweepRecord& rec = records[idx];
        rec.experiment = "fig2c";
        rec.input = input_label(in);
        rec.sigma = sigma;
        rec.phi_i = phi;
        rec.method = Method::DirectUnknown;
        guard_cell(rec, [&] {
            const SingleModeParams input(in.nbar, in.r, phi);
            const ReconResult1 r = reconstruct_single(input, sigma, FramePolicy::unknown());
            rec.angle_dev = r.angle_deviation;
            rec.nonphysical = r.nonphysical;
            rec.fidelity = fidelity1(cov_from_params1(input), cov_from_params1(r.params));
            rec.nonclassicality = nonclassical_squeezing(r.params).r_nc;
        });
    });
    return records;
}

std::vector<SweepRecord> run_fig3(const SweepConfig& cfg) {
    const std::vector<double> sigmas = grid_or_default(cfg);
    const std::vector<SingleInput> inputs = inputs_or_default(cfg);

    std::vector<SweepRecord> records(inputs.size() * sigmas.size());
    run_cells(static_cast<int>(records.size()), cfg.threads, [&](int idx) {
        const int ii = idx / static_cast<int>(sigmas.size());
        const int si = idx % static_cast<int>(sigmas.size());
        const SingleInput& in = inputs[ii];
        const double sigma = sigmas[si];
        SweepRecord& rec = records[idx];
        rec.experiment = "fig3";
        rec.input = input_label(in);
        rec.sigma = sigma;
        rec.method = Method::Mle;
        guard_cell(rec, [&] {
            const SingleModeParams input(in.nbar, in.r, cfg.input_phi);
            MleConfig mc = cfg.mle;
            mc.seed = cell_seed(cfg.seed, ii, si);
            const MleResult1 est = mle_estimate_single(input, sigma, mc);
            rec.fidelity =
                fidelity1(cov_from_params1(input), cov_from_params1(est.params));
            rec.nonclassicality = nonclassical_squeezing(est.params).r_nc;
            rec.angle_dev = std::abs(wrap_half_pi(est.params.phi - input.phi));
            rec.y = mixing_fraction_isotropic(est.params, input).y;
        });
    });
    return records;
}

std::vector<SweepRecord> run_fig4(const SweepConfig& cfg) {
    const std::vector<double> sigmas = grid_or_default(cfg);
    const std::vector<SingleInput> inputs = inputs_or_default(cfg);
    constexpr Method kMethods[] = {Method::DirectKnown, Method::Mle, Method::DirectUnknown};

    std::vector<SweepRecord> records(inputs.size() * sigmas.size() * 3);
    run_cells(static_cast<int>(records.size()), cfg.threads, [&](int idx) {
        const int mi = idx % 3;
        const int si = (idx / 3) % static_cast<int>(sigmas.size());
        const int ii = idx / (3 * static_cast<int>(sigmas.size()));
        const SingleInput& in = inputs[ii];
        const double sigma = sigmas[si];
        SweepRecord& rec = records[idx];
        rec.experiment = "fig4";
        rec.input = input_label(in);
        rec.sigma = sigma;
        rec.method = kMethods[mi];
        guard_cell(rec, [&] {
            const SingleModeParams input(in.nbar, in.r, cfg.input_phi);
            if (rec.method == Method::DirectUnknown) {
                const FrameAveraged avg =
                    frame_averaged_metrics(in.nbar, in.r, sigma, cfg.frame_grid);
                rec.fidelity = avg.fidelity;
                rec.nonclassicality = avg.r_nc;
                return;
            }
            SingleModeParams est(0, 0, 0);
            if (rec.method == Method::DirectKnown) {
                const ReconResult1 r =
                    reconstruct_single(input, sigma, FramePolicy::known(input.phi));
                est = r.params;
                rec.nonphysical = r.nonphysical;
                rec.angle_dev = r.angle_deviation;
            } else {
                MleConfig mc = cfg.mle;
                mc.seed = cell_seed(cfg.seed, ii * 8 + 1, si);
                est = mle_estimate_single(input, sigma, mc).params;
                rec.angle_dev = std::abs(wrap_half_pi(est.phi - input.phi));
                if (input.r > 0.0) rec.y = mixing_fraction_isotropic(est, input).y;
            }
            rec.fidelity = fidelity1(cov_from_params1(input), cov_from_params1(est));
            rec.nonclassicality = nonclassical_squeezing(est).r_nc;
        });
    });
    return records;
}

std::vector<SweepRecord> run_fig5(const SweepConfig& cfg) {
    const std::vector<double> sigmas = grid_or_default(cfg);
    const std::vector<SingleInput> inputs = inputs_or_default(cfg);
    constexpr Method kMethods[] = {Method::DirectKnown, Method::Mle, Method::DirectUnknown};

    std::vector<SweepRecord> records(inputs.size() * sigmas.size() * 3);
    run_cells(static_cast<int>(records.size()), cfg.threads, [&](int idx) {
        const int mi = idx % 3;
        const int si = (idx / 3) % static_cast<int>(sigmas.size());
        const int ii = idx / (3 * static_cast<int>(sigmas.size()));
        const SingleInput& in = inputs[ii];
        const double sigma = sigmas[si];
        SweepRecord& rec = records[idx];
        rec.experiment = "fig5";
        rec.input = input_label(in);
        rec.sigma = sigma;
        rec.method = kMethods[mi];
        guard_cell(rec, [&] {
            const TwoModeParams input(in.nbar, in.nbar, in.r, cfg.input_phi);
            if (rec.method == Method::DirectUnknown) {
                const FrameAveragedTwo avg =
                    frame_averaged_metrics_two(in.nbar, in.r, sigma, cfg.frame_grid);
                rec.fidelity = avg.fidelity;
                rec.nonclassicality = avg.log_negativity;
                return;
            }
            TwoModeParams est(0, 0, 0, 0);
            if (rec.method == Method::DirectKnown) {
                const ReconResult2 r =
                    reconstruct_two(input, sigma, FramePolicy::known(input.phi));
                est = r.params;
                rec.nonphysical = r.nonphysical;
                rec.angle_dev = r.angle_deviation;
            } else {
                MleConfig mc = cfg.mle;
                mc.seed = cell_seed(cfg.seed, ii * 8 + 5, si);
                est = mle_estimate_two(input, sigma, mc).params;
                rec.angle_dev = std::abs(std::remainder(est.phi - input.phi, 2.0 * kPi));
            }
            rec.fidelity =
                fidelity2(cov_from_params2(input), cov_from_params2(est)).value;
            rec.nonclassicality = log_negativity(est);
        });
    });
    return records;
}

std::vector<SweepRecord> run_experiment(const SweepConfig& cfg) {
    if (cfg.experiment == "fig2c") return run_fig2c(cfg);
    if (cfg.experiment == "fig3") return run_fig3(cfg);
    if (cfg.experiment == "fig4") return run_fig4(cfg);
    if (cfg.experiment == "fig5") return run_fig5(cfg);
    throw std::invalid_argument("unknown experiment: " + cfg.experiment);
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_num(double v) {
    if (std::isnan(v)) return "";
    return fmt_double(v);
}

}  // namespace

void emit_csv(const std::vector<SweepRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit_csv: cannot open " + path);
    out << "experiment,input,sigma,phi_i,method,fidelity,nonclassicality,angle_dev,y,"
           "nonphysical,error\n";
    for (const SweepRecord& r : records) {
        out << csv_quote(r.experiment) << ',' << csv_quote(r.input) << ','
            << csv_num(r.sigma) << ',' << csv_num(r.phi_i) << ',' << method_name(r.method)
            << ',' << csv_num(r.fidelity) << ',' << csv_num(r.nonclassicality) << ','
            << csv_num(r.angle_dev) << ',' << csv_num(r.y) << ','
            << (r.nonphysical ? '1' : '0') << ',' << csv_quote(r.error) << '\n';
    }
    if (!out.good()) throw IoError("emit_csv: write failed for " + path);
}

namespace {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> pts;  // (x, y)
};

std::string svg_chart(const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series,
                      bool log_x) {
    constexpr double kW = 840, kH = 560, kL = 80, kR = 810, kT = 50, kB = 500;
    static const char* kColors[] = {"#c0392b", "#2c3e50", "#2980b9", "#27ae60",
                                    "#8e44ad", "#d35400", "#16a085", "#7f8c8d",
                                    "#f39c12"};
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Series& s : series) {
        for (auto [x, y] : s.pts) {
            if (std::isnan(x) || std::isnan(y)) continue;
            const double xv = log_x ? std::log10(x) : x;
            xmin = std::min(xmin, xv);
            xmax = std::max(xmax, xv);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (ymax - ymin < 1e-12) { ymax += 0.5; ymin -= 0.5; }
    const double pad = 0.04 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    auto px = [&](double x) {
        const double t = ((log_x ? std::log10(x) : x) - xmin) / (xmax - xmin);
        return kL + t * (kR - kL);
    };
    auto py = [&](double y) { return kB - (y - ymin) / (ymax - ymin) * (kB - kT); };
    char buf[256];
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" height=\"560\" "
           "viewBox=\"0 0 840 560\">\n";
    svg += "<rect width=\"840\" height=\"560\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"28\" font-size=\"16\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\">%s</text>\n",
                  0.5 * kW, title.c_str());
    svg += buf;
    // axes
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"black\"/>\n",
                  kL, kB, kR, kB);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"black\"/>\n",
                  kL, kB, kL, kT);
    svg += buf;
    for (int i = 0; i <= 5; ++i) {
        const double tx = xmin + (xmax - xmin) * i / 5.0;
        const double xv = log_x ? std::pow(10.0, tx) : tx;
        const double x = kL + (kR - kL) * i / 5.0;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"black\"/>\n",
                      x, kB, x, kB + 5);
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\" "
                      "font-family=\"sans-serif\">%.3g</text>\n",
                      x, kB + 20, xv);
        svg += buf;
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        const double y = py(yv);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"black\"/>\n",
                      kL - 5, y, kL, y);
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"end\" "
                      "font-family=\"sans-serif\">%.3g</text>\n",
                      kL - 9, y + 4, yv);
        svg += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"545\" font-size=\"14\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\">%s</text>\n",
                  0.5 * (kL + kR), xlabel.c_str());
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"20\" y=\"%.1f\" font-size=\"14\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\" transform=\"rotate(-90 20 %.1f)\">%s</text>\n",
                  0.5 * (kT + kB), 0.5 * (kT + kB), ylabel.c_str());
    svg += buf;

    int ci = 0;
    double legend_y = kT + 8;
    for (const Series& s : series) {
        const char* color = kColors[ci % 9];
        const char* dash = ci % 3 == 1 ? " stroke-dasharray=\"6,3\""
                          : ci % 3 == 2 ? " stroke-dasharray=\"2,3\""
                                        : "";
        std::string pts;
        for (auto [x, y] : s.pts) {
            if (std::isnan(x) || std::isnan(y)) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x), py(y));
            pts += buf;
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\"" + dash +
               " stroke-width=\"1.6\" points=\"" + pts + "\"/>\n";
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"%s\"%s stroke-width=\"1.6\"/>\n",
                      kR - 180.0, legend_y, kR - 150.0, legend_y, color, dash);
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                      "font-family=\"sans-serif\">%s</text>\n",
                      kR - 144.0, legend_y + 4, s.name.c_str());
        svg += buf;
        legend_y += 16;
        ++ci;
    }
    svg += "</svg>\n";
    return svg;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit_svg: cannot open " + path);
    out << content;
    if (!out.good()) throw IoError("emit_svg: write failed for " + path);
}

std::vector<Series> metric_series(const std::vector<SweepRecord>& records,
                                  double SweepRecord::* field) {
    std::vector<Series> series;
    std::map<std::string, size_t> index;
    for (const SweepRecord& r : records) {
        if (!r.error.empty()) continue;
        const std::string key = r.input + " " + method_name(r.method);
        auto [it, inserted] = index.try_emplace(key, series.size());
        if (inserted) series.push_back(Series{key, {}});
        series[it->second].pts.emplace_back(r.sigma, r.*field);
    }
    return series;
}

}  // namespace

std::vector<std::string> emit_svg(const std::string& experiment,
                                  const std::vector<SweepRecord>& records,
                                  const std::string& out_dir) {
    std::vector<std::string> paths;
    auto emit = [&](const std::string& stem, const std::string& content) {
        const std::string path = out_dir + "/" + stem + ".svg";
        write_file(path, content);
        paths.push_back(path);
    };

    if (experiment == "fig2c") {
        // Deviation vs phi_i, one curve for a handful of sigmas.
        std::set<double> sigmas;
        for (const SweepRecord& r : records) sigmas.insert(r.sigma);
        std::vector<double> picks(sigmas.begin(), sigmas.end());
        std::vector<double> chosen;
        for (size_t i = 0; i < picks.size(); i += std::max<size_t>(1, picks.size() / 6))
            chosen.push_back(picks[i]);
        std::vector<Series> series;
        for (double s : chosen) {
            Series ser;
            ser.name = "sigma=" + fmt_double(s);
            for (const SweepRecord& r : records)
                if (r.sigma == s && r.error.empty()) ser.pts.emplace_back(r.phi_i, r.angle_dev);
            series.push_back(std::move(ser));
        }
        emit("fig2c_angle_dev",
             svg_chart("Squeezing-axis rotation of the direct reconstruction",
                       "input squeezing angle phi_i (rad)", "angle deviation (rad)", series,
                       false));
    } else if (experiment == "fig3") {
        emit("fig3_y", svg_chart("Thermal-reservoir fraction y of MLE estimates",
                                 "coarse-graining size sigma", "fraction y",
                                 metric_series(records, &SweepRecord::y), true));
    } else if (experiment == "fig4") {
        emit("fig4_fidelity",
             svg_chart("Fidelity of reconstructed single-mode states",
                       "coarse-graining size sigma", "fidelity F",
                       metric_series(records, &SweepRecord::fidelity), true));
        emit("fig4_rnc",
             svg_chart("Nonclassical squeezing of reconstructed states",
                       "coarse-graining size sigma", "nonclassical squeezing r_nc",
                       metric_series(records, &SweepRecord::nonclassicality), true));
    } else if (experiment == "fig5") {
        emit("fig5_fidelity",
             svg_chart("Fidelity of reconstructed two-mode states",
                       "coarse-graining size sigma", "fidelity F",
                       metric_series(records, &SweepRecord::fidelity), true));
        emit("fig5_en",
             svg_chart("Logarithmic negativity of reconstructed states",
                       "coarse-graining size sigma", "logarithmic negativity E_N",
                       metric_series(records, &SweepRecord::nonclassicality), true));
    } else {
        throw std::invalid_argument("emit_svg: unknown experiment " + experiment);
    }
    return paths;
}

}  // namespace cgtomo

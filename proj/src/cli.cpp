#include "rearr/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "rearr/csv.hpp"
#include "rearr/fubini.hpp"
#include "rearr/verify.hpp"

namespace rearr {

namespace {

std::string out_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

std::shared_ptr<IndexPartition> witnessed_partition(const RunConfig& config,
                                                    std::shared_ptr<const SeriesSource> src) {
    auto w = witness_convergability(*src, config.witness_horizon, config.witness_bound);
    if (!w.ok()) {
        std::string why;
        for (auto c : w.failed) {
            if (!why.empty()) why += ", ";
            switch (c) {
                case WitnessCondition::PosDivergence: why += "positive-part sum below bound"; break;
                case WitnessCondition::NegDivergence: why += "negative-part sum above -bound"; break;
                case WitnessCondition::TailDecay: why += "tail terms too large"; break;
            }
        }
        throw ConfigError("series", "not witnessed conditionally convergable (" + why + ")");
    }
    return IndexPartition::for_source(std::move(src), config.visit_gain);
}

int run_split(const RunConfig& config, const std::string& out_dir) {
    auto src = std::make_shared<SeriesSource>(config.make_source());
    auto part = witnessed_partition(config, src);
    CsvWriter csv(out_path(out_dir, "split.csv"));
    csv.row({"m", "t", "a_m"});
    for (std::uint64_t m = 1; m <= config.split_horizon; ++m) {
        auto t = part->membership(m);
        if (!t) break;  // finite source shorter than the horizon
        csv.row({CsvWriter::num(m), CsvWriter::num(*t), CsvWriter::num(src->term(m))});
    }
    return kExitOk;
}

Assignment build_from_config(const RunConfig& config) {
    auto src = std::make_shared<SeriesSource>(config.make_source());
    auto part = witnessed_partition(config, src);
    return build_nd(config.dimension, src, part, config.make_targets(), config.budget);
}

void write_build_csv(const Assignment& a, const std::string& path) {
    CsvWriter csv(path);
    std::vector<std::string> header;
    for (int i = 1; i <= a.n; ++i) header.push_back("j" + std::to_string(i));
    header.insert(header.end(), {"m", "a_m", "slab_d", "slab_mu"});
    csv.row(header);
    auto entries = a.entries();
    std::sort(entries.begin(), entries.end(), [](const AssignmentEntry& x, const AssignmentEntry& y) {
        return x.j < y.j;
    });
    for (const auto& e : entries) {
        std::vector<std::string> row;
        for (int i = 0; i < a.n; ++i) row.push_back(CsvWriter::num(e.j[i]));
        row.push_back(CsvWriter::num(e.m));
        row.push_back(CsvWriter::num(e.value));
        row.push_back(CsvWriter::num(e.slab_d));
        row.push_back(CsvWriter::num(e.slab_mu));
        csv.row(row);
    }
}

bool any_starved(const Assignment& a) {
    for (const auto& [key, slab] : a.root->slabs) {
        (void)key;
        if (slab.starved) return true;
    }
    return false;
}

int run_build(const RunConfig& config, const std::string& out_dir) {
    Assignment a = build_from_config(config);
    write_build_csv(a, out_path(out_dir, "build.csv"));
    return any_starved(a) ? kExitStarvation : kExitOk;
}

int run_verify(const RunConfig& config, const std::string& out_dir, double tolerance) {
    Assignment a = build_from_config(config);
    VerificationReport rep = verify_theorem(a, tolerance);
    CsvWriter csv(out_path(out_dir, "verify.csv"));
    csv.row({"sigma", "k", "measured", "target", "bound", "pass"});
    for (const auto& c : rep.checks) {
        csv.row({c.sigma.to_string(), CsvWriter::num(c.k), CsvWriter::num(c.measured), CsvWriter::num(c.target),
                 CsvWriter::num(c.bound), c.pass ? "1" : "0"});
    }
    if (any_starved(a)) return kExitStarvation;
    return rep.all_pass() ? kExitOk : kExitVerification;
}

int run_fubini(const RunConfig& config, const std::string& out_dir) {
    auto src = std::make_shared<SeriesSource>(config.make_source());
    auto part = witnessed_partition(config, src);

    // user-facing targets are per integration order; build in the matching
    // summation orders
    PermTargets build_targets(config.dimension);
    for (const auto& sigma : Permutation::all(config.dimension)) {
        TargetSpec spec = config.target_for(sigma);
        build_targets.set(integral_order_to_sum_order(sigma), spec.to_sequence());
    }
    Assignment a = build_nd(config.dimension, src, part, build_targets, config.budget);
    FubiniField field(a, config.quad_tol, config.unit_cube);

    // box schedule: explicit boxes, or sigma-shaped prefixes (outermost
    // integration axis truncated at k + 1/2, inner axes covering the windows)
    std::vector<double> extent(config.dimension, 0.0);
    for (const auto& e : a.entries())
        for (int i = 0; i < config.dimension; ++i) extent[i] = std::max(extent[i], static_cast<double>(e.j[i]));

    CsvWriter csv(out_path(out_dir, "fubini.csv"));
    csv.row({"sigma", "box", "quadrature", "coefficient_sum"});
    auto emit = [&](const Permutation& sigma, const std::vector<double>& box) {
        auto r = iterated_integral(field, sigma, box, config.quad_tol);
        std::string box_str;
        for (std::size_t i = 0; i < box.size(); ++i) {
            if (i) box_str += ' ';
            box_str += CsvWriter::num(box[i]);
        }
        csv.row({sigma.to_string(), box_str, CsvWriter::num(r.quadrature), CsvWriter::num(r.coefficient_sum)});
    };

    if (!config.boxes.empty()) {
        for (const auto& sigma : Permutation::all(config.dimension))
            for (const auto& box : config.boxes) emit(sigma, box);
    } else {
        std::uint32_t prefixes = config.box_prefixes ? config.box_prefixes : config.budget.depth;
        for (const auto& sigma : Permutation::all(config.dimension)) {
            int outer_axis = sigma(config.dimension);
            for (std::uint32_t k = 1; k <= prefixes; ++k) {
                std::vector<double> box(config.dimension);
                for (int i = 0; i < config.dimension; ++i) box[i] = extent[i] + 0.5;
                box[outer_axis - 1] = k + 0.5;
                emit(sigma, box);
            }
        }
    }
    return any_starved(a) ? kExitStarvation : kExitOk;
}

} // namespace

int run(const RunConfig& config, const std::string& command, const std::string& out_dir,
        std::optional<double> tolerance_override) {
    try {
        if (command == "split") return run_split(config, out_dir);
        if (command == "build") return run_build(config, out_dir);
        if (command == "verify")
            return run_verify(config, out_dir, tolerance_override.value_or(config.tolerance));
        if (command == "fubini") return run_fubini(config, out_dir);
        std::cerr << "unknown command: " << command << " (expected build | verify | split | fubini)\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const QuadratureFailure& e) {
        std::cerr << "quadrature failure: " << e.what() << "\n";
        return kExitQuadrature;
    } catch (const EnumerationLimit& e) {
        std::cerr << "stream exhausted: " << e.what() << "\n";
        return kExitStarvation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

} // namespace rearr

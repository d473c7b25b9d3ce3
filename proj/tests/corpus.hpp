#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "wocc/pipeline.hpp"
#include "wocc/sim.hpp"

namespace corpus {

namespace fs = std::filesystem;

inline fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("wocc_test_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

inline std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// A two-week campus written once per test binary.
inline const fs::path& small_campus()
{
    static const fs::path dir = [] {
        const auto d = scratch("campus");
        wocc::SimConfig cfg;
        cfg.weeks = 3;
        cfg.population = 4000;
        const auto campus = wocc::generate_campus(cfg);
        wocc::write_simulation(d, campus, wocc::simulate_sessions(campus, cfg), cfg);
        return d;
    }();
    return dir;
}

inline wocc::PipelineConfig config(const fs::path& out)
{
    const auto& d = small_campus();
    wocc::PipelineConfig c;
    c.sessions = d / wocc::SimFiles::sessions;
    c.timetable = d / wocc::SimFiles::timetable;
    c.roster = d / wocc::SimFiles::roster;
    c.inventory = d / wocc::SimFiles::inventory;
    c.truth = d / wocc::SimFiles::truth_counts;
    c.seed = 42;
    c.output_dir = out;
    return c;
}

} // namespace corpus

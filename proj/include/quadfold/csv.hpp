#pragma once

// Locale-independent CSV output: '.' decimal separator, 17 significant
// digits, LF line endings.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include "quadfold/dynamics.hpp"
#include "quadfold/errors.hpp"
#include "quadfold/experiments.hpp"

namespace quadfold {

inline std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc)
    {
        if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
    }

    void header(std::span<const std::string> names)
    {
        for (std::size_t i = 0; i < names.size(); ++i) out_ << (i ? "," : "") << names[i];
        out_ << '\n';
    }

    void row(std::span<const double> values)
    {
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

/// Header t_us followed by one population column per basis state.
inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                                 std::span<const std::string> labels)
{
    CsvWriter csv(path);
    std::vector<std::string> names{"t_us"};
    for (const auto& l : labels) names.push_back(column_name(l));
    csv.header(names);
    std::vector<double> row;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        row.assign(1, traj.times[k]);
        row.insert(row.end(), traj.populations[k].begin(), traj.populations[k].end());
        csv.row(row);
    }
}

inline void write_scan_csv(const std::filesystem::path& path, std::span<const ScanRow> rows)
{
    CsvWriter csv(path);
    const std::vector<std::string> names{"nu_delta2_mhz", "P1_exact", "P1_eff", "P1_rwa", "P3_exact", "P3_eff"};
    csv.header(names);
    for (const auto& r : rows) {
        const double v[] = {r.nu_delta2, r.p1_exact, r.p1_eff, r.p1_rwa, r.p3_exact, r.p3_eff};
        csv.row(v);
    }
}

inline void write_scaling_csv(const std::filesystem::path& path, std::span<const ScalingRow> rows)
{
    CsvWriter csv(path);
    const std::vector<std::string> names{"nu_trap_mhz", "deviation"};
    csv.header(names);
    for (const auto& r : rows) {
        const double v[] = {r.nu_trap, r.deviation};
        csv.row(v);
    }
}

} // namespace quadfold

#pragma once

// Command implementations behind the kinex CLI. Each writes its primary
// result to `out` (and to files under the manifest's output directory when one
// is set), diagnostics to `err`, and returns the process exit status.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "kinex/errors.hpp"
#include "kinex/experiments.hpp"
#include "kinex/io.hpp"
#include "kinex/manifest.hpp"

namespace kinex {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNonConvergence = 2,
  kExitIo = 3,
};

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw IoError("cannot write '" + (dir / name).string() + "'");
  return f;
}

inline void write_records(std::ostream& os, OutputFormat fmt,
                          std::span<const SweepRecord> records) {
  if (fmt == OutputFormat::csv) {
    io::write_records_csv(os, records);
  } else {
    io::write_records_json(os, records);
  }
}

inline int report_failures(std::span<const SweepRecord> records, std::ostream& err) {
  int code = kExitOk;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].converged) continue;
    err << "point " << i << " (tau " << records[i].tau_min << "/" << records[i].tau_max
        << ", gamma " << records[i].gamma << ") failed: " << records[i].error << '\n';
    code = kExitNonConvergence;
  }
  return code;
}

inline const char* extension(OutputFormat fmt) { return fmt == OutputFormat::csv ? ".csv" : ".json"; }

inline void write_fits(std::ostream& os, OutputFormat fmt,
                       const std::vector<std::pair<std::string, FitResult>>& fits) {
  if (fmt == OutputFormat::csv) {
    os << "abscissa,slope,intercept,r_squared\n";
    for (const auto& [name, f] : fits) {
      os << name << ',' << io::format_number(f.slope) << ',' << io::format_number(f.intercept)
         << ',' << io::format_number(f.r_squared) << '\n';
    }
  } else {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [name, f] : fits) doc[name] = io::fit_to_json(f);
    os << doc.dump(2) << '\n';
  }
}

inline int run_equilibrium(const RunManifest& m, std::ostream& out, std::ostream& err) {
  const auto rec = equilibrium_run(m.config);
  const std::vector<SweepRecord> one{rec};
  const auto ladder = m.config.ladder();
  if (m.out_dir) {
    auto f = open_output(*m.out_dir, std::string("equilibrium") + extension(m.format));
    write_records(f, m.format, one);
    if (rec.converged) {
      auto d = open_output(*m.out_dir, "distribution.csv");
      io::write_distribution_csv(d, ladder, rec.x_hat);
    }
  }
  if (m.format == OutputFormat::csv) {
    io::write_records_csv(out, one);
    if (rec.converged) {
      out << '\n';
      io::write_distribution_csv(out, ladder, rec.x_hat);
    }
  } else {
    auto doc = io::record_to_json(rec);
    doc["distribution"] = rec.x_hat;
    out << doc.dump(2) << '\n';
  }
  return report_failures(one, err);
}

inline int run_sweep(const RunManifest& m, std::ostream& out, std::ostream& err) {
  const bool tax = m.command == Command::sweep_tax;
  const auto records =
      tax ? tax_sweep(m.config, m.pairs, m.jobs) : welfare_sweep(m.config, m.gammas, m.jobs);
  write_records(out, m.format, records);

  std::vector<std::pair<std::string, FitResult>> fits;
  if (m.fit) {
    const auto axis = m.abscissa.value_or(tax ? Abscissa::delta_tau : Abscissa::w_ratio);
    fits.emplace_back(axis == Abscissa::delta_tau ? "delta_tau" : "w_ratio",
                      regression_report(records, axis));
  }
  if (m.out_dir) {
    const std::string stem = tax ? "sweep_tax" : "sweep_welfare";
    auto f = open_output(*m.out_dir, stem + extension(m.format));
    write_records(f, m.format, records);
    const auto ladder = m.config.ladder();
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!records[i].converged) continue;
      auto d = open_output(*m.out_dir, stem + "_x_hat_" + std::to_string(i) + ".csv");
      io::write_distribution_csv(d, ladder, records[i].x_hat);
    }
    if (!fits.empty()) {
      auto ff = open_output(*m.out_dir, std::string("fit") + extension(m.format));
      write_fits(ff, m.format, fits);
    }
  } else if (!fits.empty()) {
    write_fits(err, m.format, fits);
  }
  return report_failures(records, err);
}

inline int run_baseline(const RunManifest& m, std::ostream& out, std::ostream& err) {
  const std::vector<SweepRecord> one{pre_redistribution_run(m.config)};
  if (m.out_dir) {
    auto f = open_output(*m.out_dir, std::string("baseline") + extension(m.format));
    write_records(f, m.format, one);
  }
  write_records(out, m.format, one);
  return report_failures(one, err);
}

inline int run_fit(const RunManifest& m, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, FitResult>> fits;
  int code = kExitOk;
  if (m.records_path) {
    std::ifstream in(*m.records_path);
    if (!in) throw IoError("cannot open records file '" + *m.records_path + "'");
    const auto records = io::read_records_csv(in);
    const auto axis = m.abscissa.value_or(Abscissa::delta_tau);
    fits.emplace_back(axis == Abscissa::delta_tau ? "delta_tau" : "w_ratio",
                      regression_report(records, axis));
  } else {
    const auto taxes = tax_sweep(m.config, m.pairs, m.jobs);
    const auto welfare = welfare_sweep(m.config, m.gammas, m.jobs);
    code = std::max(report_failures(taxes, err), report_failures(welfare, err));
    if (!m.abscissa || *m.abscissa == Abscissa::delta_tau) {
      fits.emplace_back("delta_tau", regression_report(taxes, Abscissa::delta_tau));
    }
    if (!m.abscissa || *m.abscissa == Abscissa::w_ratio) {
      fits.emplace_back("w_ratio", regression_report(welfare, Abscissa::w_ratio));
    }
  }
  if (m.out_dir) {
    auto f = open_output(*m.out_dir, std::string("fit") + extension(m.format));
    write_fits(f, m.format, fits);
  }
  write_fits(out, m.format, fits);
  return code;
}

}  // namespace detail

/// Runs a resolved manifest, mapping failures onto exit codes.
inline int run_command(const RunManifest& m, std::ostream& out, std::ostream& err) {
  try {
    switch (m.command) {
      case Command::equilibrium:
        return detail::run_equilibrium(m, out, err);
      case Command::sweep_tax:
      case Command::sweep_welfare:
        return detail::run_sweep(m, out, err);
      case Command::baseline:
        return detail::run_baseline(m, out, err);
      case Command::fit:
        return detail::run_fit(m, out, err);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << " (last residual " << e.residual() << ")\n";
    return kExitNonConvergence;
  } catch (const StepSizeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace kinex

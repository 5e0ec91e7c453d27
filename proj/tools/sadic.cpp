// Command-line front end: spec ingestion, analysis orchestration, reporting
// and diagram export. Exit codes: 0 success, 2 spec error, 3 certificate
// conflict.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sadic/report.hpp"

namespace {

int kExitSpecError = 2;
int kExitCertificateConflict = 3;

sadic::ParsedSpec load_spec(const std::string& path) {
  return sadic::parse_spec_file(path);
}

void write_or_print(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << content;
}

void maybe_write_csv(const sadic::AnalysisArtifacts& art, const std::string& dir) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream(dir + "/spectra_diagnostics.csv") << art.spectra_csv;
  std::ofstream(dir + "/weyl_scores.csv") << art.weyl_csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact analysis of S-adic substitution systems"};
  app.require_subcommand(1);

  std::string spec_path, out_path, csv_dir, t_arg, letter_arg = "";
  long long n_arg = 0, levels_arg = 4, depth_arg = 0;

  auto add_spec = [&](CLI::App* cmd) {
    cmd->add_option("spec", spec_path, "system spec file")->required();
  };

  CLI::App* analyze = app.add_subcommand("analyze", "full JSON report");
  add_spec(analyze);
  analyze->add_option("--out", out_path, "write report to a file instead of stdout");
  analyze->add_option("--csv-dir", csv_dir, "write CSV diagnostics side files here");

  CLI::App* height = app.add_subcommand("height", "height with certificate");
  add_spec(height);

  CLI::App* eigen = app.add_subcommand("eigen", "membership verdict for a rational eigenvalue");
  add_spec(eigen);
  eigen->add_option("--t", t_arg, "candidate p/q")->required();

  CLI::App* mef_cmd = app.add_subcommand("mef", "maximal equicontinuous factor descriptor");
  add_spec(mef_cmd);

  CLI::App* toep = app.add_subcommand("toeplitz", "Toeplitz / discrete spectrum verdict");
  add_spec(toep);

  CLI::App* gen = app.add_subcommand("generate", "prefix of the limit word");
  add_spec(gen);
  gen->add_option("--letter", letter_arg, "starting letter")->required();
  gen->add_option("--n", n_arg, "length")->required();

  CLI::App* weyl = app.add_subcommand("weyl", "empirical Weyl-sum score");
  add_spec(weyl);
  weyl->add_option("--t", t_arg, "candidate p/q")->required();
  weyl->add_option("--n", n_arg, "sample length (default from spec options)");

  CLI::App* dot = app.add_subcommand("export-dot", "natural Bratteli diagram in DOT format");
  add_spec(dot);
  dot->add_option("--levels", levels_arg, "number of levels to draw");
  dot->add_option("--out", out_path, "write DOT to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    sadic::ParsedSpec ps = load_spec(spec_path);
    if (depth_arg > 0) ps.options.depth = depth_arg;
    sadic::System sys = ps.system();

    if (app.got_subcommand(analyze)) {
      sadic::AnalysisArtifacts art = sadic::analyze(ps);
      maybe_write_csv(art, csv_dir);
      write_or_print(art.report.dump(2), out_path);
    } else if (app.got_subcommand(height)) {
      sadic::HeightCertificate cert = sadic::compute_height(sys, ps.options.coboundary_depth);
      write_or_print(sadic::reportdetail::height_json(cert).dump(2), "");
    } else if (app.got_subcommand(eigen)) {
      sadic::RationalAngle t = sadic::RationalAngle::parse(t_arg);
      sadic::HeightCertificate cert = sadic::compute_height(sys, ps.options.coboundary_depth);
      sadic::MembershipVerdict v = sadic::eigenvalue_membership(sys, t, cert);
      sadic::json j;
      j["t"] = t.str();
      j["accept"] = v.accept;
      j["qualified"] = v.qualified;
      j["reason"] = v.reason;
      write_or_print(j.dump(2), "");
      } else if (app.got_subcommand(mef_cmd)) {
      sadic::HeightCertificate cert = sadic::compute_height(sys, ps.options.coboundary_depth);
      write_or_print(sadic::reportdetail::mef_json(sadic::mef(sys, cert, ps.options.depth)).dump(2),
                     "");
    } else if (app.got_subcommand(toep)) {
      sadic::HeightCertificate cert = sadic::compute_height(sys, ps.options.coboundary_depth);
      sadic::DiscreteSpectrumVerdict v =
          sadic::discrete_spectrum_verdict(sys, cert, ps.options.depth);
      sadic::CoincidenceReport co = sadic::coincidence_report(sys);
      sadic::json j = sadic::reportdetail::toeplitz_json(sys, v, co);
      if (!v.toeplitz && sys.spec().form() == sadic::DirectiveSpec::Form::IncreasingRuns &&
          sys.spec().run_offset() == 1 && sys.spec().min_run() == 1) {
        sadic::System tele = sadic::telescope_merge_separator(sys);
        sadic::HeightCertificate th = sadic::compute_height(tele, ps.options.coboundary_depth);
        sadic::DiscreteSpectrumVerdict tv =
            sadic::discrete_spectrum_verdict(tele, th, ps.options.depth);
        sadic::CoincidenceReport tco = sadic::coincidence_report(tele);
        j["after_telescoping"] = sadic::reportdetail::toeplitz_json(tele, tv, tco);
      }
      write_or_print(j.dump(2), "");
    } else if (app.got_subcommand(gen)) {
      int letter = sys.alphabet().index(letter_arg);
      sadic::GeneratedPrefix gp =
          sadic::generate_prefix(sys, letter, static_cast<size_t>(n_arg), ps.options.corpus_cap);
      sadic::json j;
      j["letter"] = letter_arg;
      j["n"] = gp.prefix.size();
      j["certified"] = gp.certified;
      j["partial"] = gp.partial;
      j["note"] = gp.note;
      j["prefix"] = sadic::word_to_string(sys.alphabet(), gp.prefix);
      write_or_print(j.dump(2), "");
    } else if (app.got_subcommand(weyl)) {
      size_t n = n_arg > 0 ? static_cast<size_t>(n_arg) : ps.options.weyl_length;
      sadic::RationalAngle t = sadic::RationalAngle::parse(t_arg);
      sadic::GeneratedPrefix gp = sadic::generate_prefix(sys, 0, n, ps.options.corpus_cap);
      sadic::WeylThresholds th{ps.options.persist_ratio, ps.options.persist_floor,
                               ps.options.decay_ratio};
      sadic::SpectralScore sc = sadic::weyl_score(gp.prefix, t, sys.alphabet().size(), th);
      write_or_print(sadic::reportdetail::weyl_json(t.str(), sc, sys.alphabet()).dump(2), "");
    } else if (app.got_subcommand(dot)) {
      write_or_print(sadic::bratteli_dot(sys, levels_arg), out_path);
    }
    return 0;
  } catch (const sadic::SpecParseError& e) {
    std::cerr << "spec error: " << spec_path << ": " << e.what() << "\n";
    return kExitSpecError;
  } catch (const sadic::CertificateConflictError& e) {
    std::cerr << "certificate conflict: " << e.what() << "\n";
    return kExitCertificateConflict;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

// Batch front end: loads measure/variable/channel files, dispatches to the
// library and prints aligned tables or JSON. Exit codes: 0 success, 1 domain
// failure (positivity, derivative, integrability, channel search...), 2 file
// parse or schema failure.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ovmkit/decompose.hpp"
#include "ovmkit/json_io.hpp"
#include "ovmkit/ovmkit.hpp"
#include "ovmkit/tomography.hpp"

namespace {

using namespace ovmkit;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt(Complex z) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%.10g%+.10gi", z.real(), z.imag());
  return buf;
}

void print_matrix(std::ostream& os, const Mat& m, const std::string& indent = "  ") {
  std::vector<std::vector<std::string>> cells(m.rows());
  std::size_t width = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      cells[i].push_back(fmt(m(i, j)));
      width = std::max(width, cells[i].back().size());
    }
  }
  for (auto& row : cells) {
    os << indent << "[";
    for (auto& c : row) os << " " << std::string(width - c.size(), ' ') << c;
    os << " ]\n";
  }
}

void print_measure(std::ostream& os, const HybridMeasure& mu) {
  for (const auto& p : mu.pieces()) {
    os << "  (" << fmt(p.lo) << ", " << fmt(p.hi) << "]  density " << fmt(p.value) << "\n";
  }
  for (const auto& atom : mu.space().atoms()) {
    os << "  atom '" << atom.id << "'  weight " << fmt(mu.atom_weight(atom.id)) << "\n";
  }
  os << "  total " << fmt(mu.total()) << "\n";
}

void print_piecewise_operator(std::ostream& os, const PiecewiseOperator& f) {
  for (const auto& p : f.pieces) {
    os << "(" << fmt(p.lo) << ", " << fmt(p.hi) << "]:\n";
    print_matrix(os, p.value);
  }
  for (const auto& [id, m] : f.atoms) {
    os << "atom '" << id << "':\n";
    print_matrix(os, m);
  }
}

Json piecewise_operator_json(const PiecewiseOperator& f) {
  Json j;
  j["dim"] = f.dim;
  j["pieces"] = Json::array();
  for (const auto& p : f.pieces) {
    j["pieces"].push_back({{"piece", {p.lo, p.hi}}, {"matrix", to_json(p.value)}});
  }
  j["atoms"] = Json::object();
  for (const auto& [id, m] : f.atoms) j["atoms"][id] = to_json(m);
  return j;
}

struct Options {
  bool json = false;
  std::optional<double> tol;  // --tol or OVMKIT_TOL
  int max_iter = 0;           // per-command default applied at use

  double tol_or(double fallback) const { return tol ? *tol : fallback; }
};

std::optional<double> env_tol() {
  const char* v = std::getenv("OVMKIT_TOL");
  if (!v || !*v) return {};
  try {
    return std::stod(v);
  } catch (...) {
    throw parse_error("OVMKIT_TOL is not a number");
  }
}

DensityMatrix load_rho(const std::string& spec, int dim) {
  if (spec.empty() || spec == "mixed") return maximally_mixed(dim);
  return density_from_json(read_json_file(spec), spec);
}

OperatorMeasure load_ovm(const std::string& path) {
  return ovm_from_json(read_json_file(path), path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ovmkit - a desk-scale calculus for operator-valued measures"};
  app.require_subcommand(1);

  Options opt;
  std::string ovm_path, omega_path, nu_path, qrv_path, channel_path, rho_spec = "mixed";
  std::string measure_path, space_path, residual_path, family_path, cuts_arg;
  std::string nu1_path, nu2_path;
  std::vector<std::string> part_paths;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_flag("--json", opt.json, "emit JSON instead of tables");
    cmd->add_option("--tol", [&](const CLI::results_t& r) {
      opt.tol = std::stod(r[0]);
      return true;
    }, "tolerance override");
  };

  CLI::App* show = app.add_subcommand("show", "load, validate and display a file");
  show->add_option("--ovm", ovm_path);
  show->add_option("--measure", measure_path);
  show->add_option("--qrv", qrv_path);
  show->add_option("--channel", channel_path);
  show->add_option("--space", space_path);
  add_common(show);

  CLI::App* nurho = app.add_subcommand("nu-rho", "induced scalar measure tr(rho nu(.))");
  nurho->add_option("--ovm", ovm_path)->required();
  nurho->add_option("--rho", rho_spec, "mixed or a state file");
  add_common(nurho);

  CLI::App* rn = app.add_subcommand("rn", "derivative of nu with respect to nu_rho");
  rn->add_option("--ovm", ovm_path)->required();
  rn->add_option("--rho", rho_spec, "mixed or a state file");
  add_common(rn);

  CLI::App* rnovm = app.add_subcommand("rn-ovm", "derivative of omega with respect to nu");
  rnovm->add_option("--omega", omega_path)->required();
  rnovm->add_option("--nu", nu_path)->required();
  rnovm->add_option("--rho", rho_spec, "mixed or a state file");
  add_common(rnovm);

  CLI::App* integ = app.add_subcommand("integrate", "integral of a variable against a measure");
  integ->add_option("--ovm", ovm_path)->required();
  integ->add_option("--qrv", qrv_path)->required();
  add_common(integ);

  CLI::App* integrable = app.add_subcommand("integrable", "integrability test with divergence report");
  integrable->add_option("--ovm", ovm_path)->required();
  integrable->add_option("--qrv", qrv_path)->required();
  add_common(integrable);

  CLI::App* lebesgue = app.add_subcommand("lebesgue", "absolutely continuous + singular split");
  lebesgue->add_option("--omega", omega_path)->required();
  lebesgue->add_option("--nu", nu_path)->required();
  add_common(lebesgue);

  CLI::App* atomic = app.add_subcommand("atomic-split", "atomic + non-atomic split");
  atomic->add_option("--ovm", ovm_path)->required();
  add_common(atomic);

  CLI::App* douglas = app.add_subcommand("douglas", "normalizing factorization through nu(X)^{1/2}");
  douglas->add_option("--ovm", ovm_path)->required();
  douglas->add_option("--residual", residual_path, "residual probability measure file");
  add_common(douglas);

  CLI::App* cstar = app.add_subcommand("cstar", "C*-convex decomposition of a sum of measures");
  cstar->add_option("--part", part_paths, "measure file (repeatable)")->required();
  add_common(cstar);

  CLI::App* atomic_cstar_cmd = app.add_subcommand("atomic-cstar", "atomic/non-atomic C*-convex form");
  atomic_cstar_cmd->add_option("--ovm", ovm_path)->required();
  add_common(atomic_cstar_cmd);

  CLI::App* naimark = app.add_subcommand("naimark", "projection-valued dilation of an atomic measure");
  naimark->add_option("--ovm", ovm_path)->required();
  add_common(naimark);

  CLI::App* discretize_cmd = app.add_subcommand("discretize", "collapse intervals onto grid cells");
  discretize_cmd->add_option("--ovm", ovm_path)->required();
  discretize_cmd->add_option("--cuts", cuts_arg, "comma-separated cut points");
  add_common(discretize_cmd);

  CLI::App* ic = app.add_subcommand("ic-check", "informational completeness test");
  ic->add_option("--ovm", ovm_path)->required();
  add_common(ic);

  CLI::App* basis = app.add_subcommand("basis-check", "measurement basis verification");
  basis->add_option("--ovm", ovm_path)->required();
  basis->add_option("--family", family_path, "file with {\"sets\": [...]}")->required();
  basis->add_option("--max-iter", opt.max_iter, "cone minimization iterations");
  add_common(basis);

  CLI::App* cverify = app.add_subcommand("clean-verify", "check nu2 = dual(channel) o nu1");
  cverify->add_option("--nu1", nu1_path)->required();
  cverify->add_option("--nu2", nu2_path)->required();
  cverify->add_option("--channel", channel_path)->required();
  add_common(cverify);

  CLI::App* cfind = app.add_subcommand("clean-find", "search for a channel with nu2 = dual o nu1");
  cfind->add_option("--nu1", nu1_path)->required();
  cfind->add_option("--nu2", nu2_path)->required();
  cfind->add_option("--max-iter", opt.max_iter, "projection iterations (default 5000)");
  add_common(cfind);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!opt.tol) opt.tol = env_tol();
    std::ostream& os = std::cout;

    if (show->parsed()) {
      if (!ovm_path.empty()) {
        OperatorMeasure nu = load_ovm(ovm_path);
        OvmValidation v = validate(nu, opt.tol_or(tol::psd));
        if (opt.json) {
          Json j = to_json(nu);
          j["validation"] = {{"positive", v.positive},
                             {"probability", v.probability},
                             {"min_piece_eigenvalue", v.min_piece_eigenvalue},
                             {"total", to_json(v.total)}};
          os << j.dump(2) << "\n";
        } else {
          os << "operator measure: dim " << nu.dim() << ", " << nu.terms().size()
             << " terms, " << nu.pieces().size() << " canonical pieces, "
             << nu.space().atoms().size() << " atoms\n";
          os << "positive: " << (v.positive ? "yes" : "no")
             << "   probability: " << (v.probability ? "yes" : "no")
             << "   min piece eigenvalue: " << fmt(v.min_piece_eigenvalue) << "\n";
          os << "total nu(X):\n";
          print_matrix(os, v.total);
        }
      } else if (!measure_path.empty()) {
        HybridMeasure mu = measure_from_json_standalone(read_json_file(measure_path), measure_path);
        if (opt.json) {
          os << to_json(mu, true).dump(2) << "\n";
        } else {
          os << "hybrid measure (positive: " << (mu.is_positive() ? "yes" : "no") << ")\n";
          print_measure(os, mu);
        }
      } else if (!qrv_path.empty()) {
        QuantumRandomVariable f = qrv_from_json(read_json_file(qrv_path), qrv_path);
        if (opt.json) {
          os << to_json(f).dump(2) << "\n";
        } else {
          os << "quantum random variable: dim " << f.dim() << ", " << f.pieces().size()
             << " pieces, self-adjoint: " << (f.is_self_adjoint() ? "yes" : "no")
             << ", positive: " << (f.is_positive() ? "yes" : "no") << "\n";
        }
      } else if (!channel_path.empty()) {
        Channel ch = channel_from_json(read_json_file(channel_path), channel_path, opt.tol_or(1e-7));
        if (opt.json) {
          os << to_json(ch).dump(2) << "\n";
        } else {
          os << "channel: " << ch.in_dim() << " -> " << ch.out_dim() << ", "
             << ch.kraus().size() << " Kraus operators, Choi min eigenvalue "
             << fmt(min_eigenvalue(ch.choi())) << "\n";
        }
      } else if (!space_path.empty()) {
        SampleSpace sp = space_from_json(read_json_file(space_path), space_path);
        if (opt.json) {
          os << to_json(sp).dump(2) << "\n";
        } else {
          os << "sample space: " << sp.intervals().size() << " intervals, "
             << sp.atoms().size() << " atoms, total length " << fmt(sp.total_length())
             << "\n";
        }
      } else {
        throw parse_error("show: pass one of --ovm/--measure/--qrv/--channel/--space");
      }
    } else if (nurho->parsed()) {
      OperatorMeasure nu = load_ovm(ovm_path);
      HybridMeasure mu = induced_measure(nu, load_rho(rho_spec, nu.dim()));
      if (opt.json) {
        os << to_json(mu, true).dump(2) << "\n";
      } else {
        print_measure(os, mu);
      }
    } else if (rn->parsed()) {
      OperatorMeasure nu = load_ovm(ovm_path);
      PiecewiseOperator d = rn_derivative_state(nu, load_rho(rho_spec, nu.dim()),
                                                opt.tol_or(tol::psd));
      if (opt.json) {
        os << piecewise_operator_json(d).dump(2) << "\n";
      } else {
        print_piecewise_operator(os, d);
      }
    } else if (rnovm->parsed()) {
      OperatorMeasure omega = load_ovm(omega_path);
      OperatorMeasure nu = load_ovm(nu_path);
      std::optional<DensityMatrix> rho;
      if (rho_spec != "mixed") rho = load_rho(rho_spec, nu.dim());
      PiecewiseOperator g = rn_derivative_ovm(omega, nu, rho, opt.tol_or(1e-8));
      if (opt.json) {
        os << piecewise_operator_json(g).dump(2) << "\n";
      } else {
        print_piecewise_operator(os, g);
        os << "sup norm " << fmt(sup_norm(g)) << "\n";
      }
    } else if (integ->parsed()) {
      OperatorMeasure nu = load_ovm(ovm_path);
      QuantumRandomVariable f = qrv_from_json(read_json_file(qrv_path), qrv_path);
      Mat value = integrate(f, nu, opt.tol_or(tol::psd));
      if (opt.json) {
        os << Json{{"integral", to_json(value)}}.dump(2) << "\n";
      } else {
        print_matrix(os, value, "");
      }
    } else if (integrable->parsed()) {
      OperatorMeasure nu = load_ovm(ovm_path);
      QuantumRandomVariable f = qrv_from_json(read_json_file(qrv_path), qrv_path);
      IntegrabilityReport rep = is_integrable(f, nu);
      if (opt.json) {
        Json j{{"integrable", rep.integrable}, {"weakly_integrable", rep.weakly_integrable}};
        j["divergences"] = Json::array();
        for (const auto& d : rep.divergences) {
          j["divergences"].push_back({{"part", part_name(d.part)},
                                      {"piece", {d.lo, d.hi}},
                                      {"alpha", d.alpha},
                                      {"coefficient", d.coefficient}});
        }
        os << j.dump(2) << "\n";
      } else {
        os << "integrable: " << (rep.integrable ? "yes" : "no")
           << "   (state pairings of f alone: "
           << (rep.weakly_integrable ? "all integrable" : "divergent") << ")\n";
        for (const auto& d : rep.divergences) {
          os << "  divergent: part " << part_name(d.part) << " on (" << fmt(d.lo) << ", "
             << fmt(d.hi) << "], alpha " << fmt(d.alpha) << ", coefficient "
             << fmt(d.coefficient) << "\n";
        }
      }
    } else if (lebesgue->parsed()) {
      OperatorMeasure omega = load_ovm(omega_path);
      OperatorMeasure nu = load_ovm(nu_path);
      auto [ac, sing] = lebesgue_decompose_ovm(omega, nu, opt.tol_or(tol::psd));
      if (opt.json) {
        os << Json{{"absolutely_continuous", to_json(ac)}, {"singular", to_json(sing)}}.dump(2)
           << "\n";
      } else {
        os << "absolutely continuous part total:\n";
        print_matrix(os, ac.total());
        os << "singular part total:\n";
        print_matrix(os, sing.total());
      }
    } else if (atomic->parsed()) {
      OperatorMeasure nu = load_ovm(ovm_path);
      auto [a, na] = atomic_split_ovm(nu, opt.tol_or(tol::psd));
      if (opt.json) {
        os << Json{{"atomic", to_json(a)}, {"nonatomic", to_json(na)}}.dump(2) << "\n";
      } else {
        os << "atomic part total:\n";
        print_matrix(os, a.total());
        os << "non-atomic part total:\n";
        print_matrix(os, na.total());
      }
    } else if (douglas->parsed()) {
      OperatorMeasure nu = load_ovm(ovm_path);
      std::optional<HybridMeasure> residual;
      if (!residual_path.empty()) {
        residual = measure_from_json_standalone(read_json_file(residual_path), residual_path);
      }
      OperatorMeasure omega = douglas_factor(nu, residual, opt.tol_or(tol::psd));
      if (opt.json) {
        os << to_json(omega).dump(2) << "\n";
      } else {
        os << "factor omega (quantum probability measure), total:\n";
        print_matrix(os, omega.total());
      }
    } else if (cstar->parsed()) {
      std::vector<OperatorMeasure> parts;
      for (const auto& p : part_paths) parts.push_back(load_ovm(p));
      CStarDecomposition dec = cstar_convex_decompose(parts, opt.tol_or(tol::psd));
      if (opt.json) {
        Json j;
        j["parts"] = Json::array();
        for (const auto& part : dec.parts) {
          j["parts"].push_back(
              {{"coefficient", to_json(part.coefficient)}, {"gamma", to_json(part.gamma)}});
        }
        os << j.dump(2) << "\n";
      } else {
        for (std::size_t i = 0; i < dec.parts.size(); ++i) {
          os << "part " << i << " coefficient S_" << i << ":\n";
          print_matrix(os, dec.parts[i].coefficient);
        }
      }
    } else if (atomic_cstar_cmd->parsed()) {
      OperatorMeasure nu = load_ovm(ovm_path);
      AtomicCStar dec = atomic_cstar(nu, opt.tol_or(tol::psd));
      if (opt.json) {
        os << Json{{"p", to_json(dec.p)},
                   {"gamma_atomic", to_json(dec.gamma_atomic)},
                   {"gamma_nonatomic", to_json(dec.gamma_nonatomic)}}
                  .dump(2)
           << "\n";
      } else {
        os << "P = atomic total:\n";
        print_matrix(os, dec.p);
      }
    } else if (naimark->parsed()) {
      OperatorMeasure nu = load_ovm(ovm_path);
      NaimarkDilation dil = naimark_dilate(nu, opt.tol_or(tol::psd));
      if (opt.json) {
        os << Json{{"big_dim", dil.big_dim},
                   {"v", to_json(dil.v)},
                   {"pvm", to_json(dil.pvm)}}
                  .dump(2)
           << "\n";
      } else {
        os << "dilation to dimension " << dil.big_dim << "; V:\n";
        print_matrix(os, dil.v);
      }
    } else if (discretize_cmd->parsed()) {
      OperatorMeasure nu = load_ovm(ovm_path);
      std::vector<double> cuts;
      std::stringstream ss(cuts_arg);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) cuts.push_back(std::stod(tok));
      }
      OperatorMeasure atomsed = discretize(nu, cuts);
      if (opt.json) {
        os << to_json(atomsed).dump(2) << "\n";
      } else {
        os << "discretized to " << atomsed.space().atoms().size() << " atoms; total:\n";
        print_matrix(os, atomsed.total());
      }
    } else if (ic->parsed()) {
      OperatorMeasure nu = load_ovm(ovm_path);
      MeasurementSpace ms = measurement_space(nu, opt.tol_or(tol::psd));
      bool complete = is_informationally_complete(nu, opt.tol_or(tol::psd));
      if (opt.json) {
        os << Json{{"informationally_complete", complete},
                   {"rank", ms.rank},
                   {"dim_squared", nu.dim() * nu.dim()}}
                  .dump(2)
           << "\n";
      } else {
        os << "measurement space rank " << ms.rank << " of " << nu.dim() * nu.dim()
           << "; informationally complete: " << (complete ? "yes" : "no") << "\n";
      }
    } else if (basis->parsed()) {
      OperatorMeasure nu = load_ovm(ovm_path);
      Json jf = read_json_file(family_path);
      const Json& sets = jsondetail::expect(jf, "sets", family_path);
      std::vector<MeasurableSet> family;
      for (std::size_t i = 0; i < sets.size(); ++i) {
        family.push_back(set_from_json(sets[i], nu.space(),
                                       family_path + ".sets[" + std::to_string(i) + "]"));
      }
      int iters = opt.max_iter > 0 ? opt.max_iter : 200;
      MeasurementBasisReport rep =
          verify_measurement_basis(nu, family, iters, opt.tol_or(1e-9));
      if (opt.json) {
        Json j{{"verdict", rep.verdict},
               {"independent", rep.independent},
               {"spans", rep.spans},
               {"necessary_margins", rep.necessary_margins},
               {"cone_margins", rep.cone_margins},
               {"residual", to_json(rep.residual)}};
        j["coefficient_measures"] = Json::array();
        for (const auto& mu : rep.coefficient_measures) {
          j["coefficient_measures"].push_back(to_json(mu));
        }
        os << j.dump(2) << "\n";
      } else {
        os << "measurement basis: " << (rep.verdict ? "yes" : "no")
           << " (independent: " << (rep.independent ? "yes" : "no")
           << ", spans: " << (rep.spans ? "yes" : "no") << ")\n";
        os << "residual norm " << fmt(operator_norm(rep.residual)) << "\n";
        for (std::size_t j = 0; j < rep.necessary_margins.size(); ++j) {
          os << "  mu_" << j << ": piecewise margin " << fmt(rep.necessary_margins[j])
             << ", cone margin " << fmt(rep.cone_margins[j]) << "\n";
        }
      }
    } else if (cverify->parsed()) {
      OperatorMeasure nu1 = load_ovm(nu1_path);
      OperatorMeasure nu2 = load_ovm(nu2_path);
      Channel ch = channel_from_json(read_json_file(channel_path), channel_path, opt.tol_or(1e-7));
      CleanVerifyReport rep = verify_cleaner(nu2, nu1, ch, opt.tol_or(1e-7));
      if (opt.json) {
        os << Json{{"cleaner", rep.cleaner},
                   {"max_residual", rep.max_residual},
                   {"locus", rep.locus}}
                  .dump(2)
           << "\n";
      } else {
        os << "nu2 = dual(channel) o nu1: " << (rep.cleaner ? "yes" : "no")
           << " (max residual " << fmt(rep.max_residual)
           << (rep.locus.empty() ? "" : " at " + rep.locus) << ")\n";
      }
      if (!rep.cleaner) return 1;
    } else if (cfind->parsed()) {
      OperatorMeasure nu1 = load_ovm(nu1_path);
      OperatorMeasure nu2 = load_ovm(nu2_path);
      int iters = opt.max_iter > 0 ? opt.max_iter : 5000;
      ChannelSearch search = find_channel(nu1, nu2, iters, opt.tol_or(1e-7));
      if (!search.channel) {
        std::cerr << "no channel found after " << search.iterations
                  << " iterations (residual " << fmt(search.residual)
                  << "); inconclusive, not a disproof\n";
        return 1;
      }
      if (opt.json) {
        Json j = to_json(*search.channel);
        j["residual"] = search.residual;
        j["iterations"] = search.iterations;
        os << j.dump(2) << "\n";
      } else {
        os << "channel found: " << search.channel->kraus().size()
           << " Kraus operators, residual " << fmt(search.residual) << ", "
           << search.iterations << " iterations\n";
      }
    }
    return 0;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

// Exit-code contract of the command line front end, exercised per command
// against the fixture corpus: 0 success, 1 domain failure, 2 parse/schema
// failure.

#include <cstdlib>
#include <fstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

namespace {

const std::string kCli = OVMKIT_CLI_PATH;
const std::string kFix = OVMKIT_FIXTURES_DIR;

struct RunResult {
  int code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  std::string out_path = "/tmp/ovmkit_cli_out.txt";
  std::string cmd = kCli + " " + args + " > " + out_path + " 2>&1";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WEXITSTATUS(status);
  std::ifstream in(out_path);
  r.output.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return r;
}

std::string fix(const std::string& name) { return kFix + "/" + name; }

}  // namespace

TEST_CASE("show validates and reports each file kind") {
  CHECK(run("show --ovm " + fix("ovm_m2.json")).code == 0);
  CHECK(run("show --measure " + fix("measure_uniform01.json")).code == 0);
  CHECK(run("show --qrv " + fix("qrv_identity.json")).code == 0);
  CHECK(run("show --channel " + fix("channel_identity2.json")).code == 0);
  auto r = run("show --ovm " + fix("ovm_m2.json"));
  CHECK(r.output.find("probability: yes") != std::string::npos);
}

TEST_CASE("rn prints the two diagonal derivative blocks") {
  auto r = run("rn --ovm " + fix("ovm_m2.json") + " --rho mixed");
  CHECK(r.code == 0);
  CHECK(r.output.find("(0, 1]") != std::string::npos);
  CHECK(r.output.find("2") != std::string::npos);
}

TEST_CASE("nu-rho emits a loadable standalone measure") {
  auto r = run("nu-rho --ovm " + fix("ovm_m2.json") + " --json");
  CHECK(r.code == 0);
  ovmkit::Json j = ovmkit::Json::parse(r.output);
  ovmkit::HybridMeasure mu = ovmkit::measure_from_json_standalone(j, "out");
  CHECK(mu.density_at(0, 0.5) == Catch::Approx(0.5));
}

TEST_CASE("integrate prints the measure of the whole space for the indicator") {
  auto r = run("integrate --ovm " + fix("ovm_m2.json") + " --qrv " +
               fix("qrv_identity.json") + " --json");
  CHECK(r.code == 0);
  ovmkit::Json j = ovmkit::Json::parse(r.output);
  ovmkit::Mat m = ovmkit::matrix_from_json(j["integral"], "integral");
  CHECK(ovmkit::max_abs(m - ovmkit::identity(2)) < 1e-12);
}

TEST_CASE("integrate fails with exit 1 on the divergent variable") {
  auto r = run("integrate --ovm " + fix("ovm_m2.json") + " --qrv " +
               fix("qrv_x_inverse_offdiag.json"));
  CHECK(r.code == 1);
  CHECK(r.output.find("integrable") != std::string::npos);
}

TEST_CASE("integrable reports the divergence without failing") {
  auto r = run("integrable --ovm " + fix("ovm_m2.json") + " --qrv " +
               fix("qrv_x_inverse_offdiag.json") + " --json");
  CHECK(r.code == 0);
  ovmkit::Json j = ovmkit::Json::parse(r.output);
  CHECK(j["integrable"] == false);
  CHECK(j["weakly_integrable"] == true);
  CHECK(j["divergences"].size() >= 1);
}

TEST_CASE("decomposition commands succeed on fixtures") {
  CHECK(run("lebesgue --omega " + fix("ovm_m2.json") + " --nu " + fix("ovm_m2.json")).code == 0);
  CHECK(run("atomic-split --ovm " + fix("ovm_m2.json")).code == 0);
  CHECK(run("douglas --ovm " + fix("ovm_m2.json") + " --residual " +
            fix("measure_uniform01.json")).code == 0);
  CHECK(run("atomic-cstar --ovm " + fix("ovm_m2.json")).code == 0);
  CHECK(run("naimark --ovm " + fix("ovm_trine.json")).code == 0);
  CHECK(run("discretize --ovm " + fix("ovm_m2.json") + " --cuts 0.5,1.5").code == 0);
}

TEST_CASE("douglas output is itself a loadable probability measure") {
  auto r = run("douglas --ovm " + fix("ovm_trine.json") + " --json");
  CHECK(r.code == 0);
  ovmkit::Json j = ovmkit::Json::parse(r.output);
  ovmkit::OperatorMeasure omega = ovmkit::ovm_from_json(j, "omega");
  CHECK(ovmkit::validate(omega).probability);
}

TEST_CASE("cstar accepts repeated parts") {
  // Two copies of a halved probability measure sum to a probability measure.
  ovmkit::Json j = ovmkit::read_json_file(fix("ovm_m2.json"));
  for (auto& t : j["terms"]) {
    for (auto& row : t["matrix"]) {
      for (auto& entry : row) {
        entry[0] = entry[0].get<double>() / 2.0;
        entry[1] = entry[1].get<double>() / 2.0;
      }
    }
  }
  j["flags"] = {{"positive", true}, {"probability", false}};
  std::string half_path = "/tmp/ovmkit_half.json";
  ovmkit::write_json_file(half_path, j);
  CHECK(run("cstar --part " + half_path + " --part " + half_path).code == 0);
  CHECK(run("cstar --part " + fix("ovm_m2.json") + " --part " + fix("ovm_m2.json")).code == 1);
}

TEST_CASE("naimark rejects continuous measures with exit 1") {
  CHECK(run("naimark --ovm " + fix("ovm_m2.json")).code == 1);
}

TEST_CASE("rn-ovm reports no-derivative situations with exit 1") {
  // A measure against itself is fine.
  CHECK(run("rn-ovm --omega " + fix("ovm_m2.json") + " --nu " + fix("ovm_m2.json")).code == 0);

  // A full measure against a rank-one reference violates the range condition.
  ovmkit::SampleSpace sp({{0.0, 1.0}}, {});
  ovmkit::Mat e11 = ovmkit::Mat::Zero(2, 2);
  e11(0, 0) = 1.0;
  ovmkit::OperatorMeasure corner(sp, 2, {{ovmkit::HybridMeasure::lebesgue(sp), e11}});
  ovmkit::OperatorMeasure full(sp, 2, {{ovmkit::HybridMeasure::lebesgue(sp), ovmkit::identity(2)}});
  ovmkit::write_json_file("/tmp/ovmkit_corner.json", ovmkit::to_json(corner));
  ovmkit::write_json_file("/tmp/ovmkit_full.json", ovmkit::to_json(full));
  auto r = run("rn-ovm --omega /tmp/ovmkit_full.json --nu /tmp/ovmkit_corner.json");
  CHECK(r.code == 1);
  CHECK(r.output.find("derivative") != std::string::npos);
}

TEST_CASE("ic-check distinguishes the six-effect family from a projective one") {
  auto r1 = run("ic-check --ovm " + fix("ovm_pauli6.json") + " --json");
  CHECK(r1.code == 0);
  CHECK(ovmkit::Json::parse(r1.output)["informationally_complete"] == true);

  auto r2 = run("ic-check --ovm " + fix("ovm_pvm2.json") + " --json");
  CHECK(r2.code == 0);
  CHECK(ovmkit::Json::parse(r2.output)["informationally_complete"] == false);
}

TEST_CASE("basis-check verifies the tetrahedral family end to end") {
  auto r = run("basis-check --ovm " + fix("ovm_sic.json") + " --family " +
               fix("family_sic.json") + " --json");
  CHECK(r.code == 0);
  ovmkit::Json j = ovmkit::Json::parse(r.output);
  CHECK(j["verdict"] == true);
  CHECK(j["coefficient_measures"].size() == 4);
}

TEST_CASE("clean-verify accepts the identity witness") {
  CHECK(run("clean-verify --nu1 " + fix("ovm_m2.json") + " --nu2 " + fix("ovm_m2.json") +
            " --channel " + fix("channel_identity2.json")).code == 0);
}

TEST_CASE("clean-verify rejects a wrong witness with exit 1") {
  CHECK(run("clean-verify --nu1 " + fix("ovm_pauli6.json") + " --nu2 " +
            fix("ovm_pvm2.json") + " --channel " + fix("channel_identity2.json")).code == 1);
}

TEST_CASE("clean-find certifies self-cleanness and emits a loadable channel") {
  auto r = run("clean-find --nu1 " + fix("ovm_m2.json") + " --nu2 " + fix("ovm_m2.json") +
               " --json");
  CHECK(r.code == 0);
  ovmkit::Json j = ovmkit::Json::parse(r.output);
  ovmkit::Channel ch = ovmkit::channel_from_json(j, "found");
  CHECK(ch.in_dim() == 2);
}

TEST_CASE("clean-find returns 1 when the search comes up empty") {
  // Incompatible supports: nu1 vanishes where nu2 lives.
  ovmkit::SampleSpace sp({{0.0, 1.0}, {1.0, 2.0}}, {});
  ovmkit::OperatorMeasure nu1(sp, 2,
      {{ovmkit::HybridMeasure::indicator_density(sp, 0, 0.0, 1.0), ovmkit::identity(2)}});
  ovmkit::OperatorMeasure nu2(sp, 2,
      {{ovmkit::HybridMeasure::lebesgue(sp), ovmkit::Mat(0.5 * ovmkit::identity(2))}});
  ovmkit::write_json_file("/tmp/ovmkit_nu1.json", ovmkit::to_json(nu1));
  ovmkit::write_json_file("/tmp/ovmkit_nu2.json", ovmkit::to_json(nu2));
  CHECK(run("clean-find --nu1 /tmp/ovmkit_nu1.json --nu2 /tmp/ovmkit_nu2.json --max-iter 50").code == 1);
}

TEST_CASE("file problems exit with code 2") {
  CHECK(run("show --ovm /nonexistent.json").code == 2);

  std::ofstream("/tmp/ovmkit_malformed.json") << "{ not json";
  CHECK(run("show --ovm /tmp/ovmkit_malformed.json").code == 2);

  // Non-square matrix inside an otherwise valid document.
  ovmkit::Json j = ovmkit::read_json_file(fix("ovm_m2.json"));
  j["terms"][0]["matrix"][0].erase(1);
  ovmkit::write_json_file("/tmp/ovmkit_nonsquare.json", j);
  auto r = run("show --ovm /tmp/ovmkit_nonsquare.json");
  CHECK(r.code == 2);
  CHECK(r.output.find("matrix") != std::string::npos);
}

TEST_CASE("unknown flags exit with code 2") {
  CHECK(run("show --bogus x").code == 2);
  CHECK(run("rn").code == 2);  // missing required --ovm
}

TEST_CASE("domain failures exit with code 1") {
  // An indefinite measure cannot have a state derivative.
  ovmkit::SampleSpace sp({{0.0, 1.0}}, {});
  ovmkit::Mat indef(2, 2);
  indef << 1, 2, 2, 1;
  ovmkit::OperatorMeasure bad(sp, 2, {{ovmkit::HybridMeasure::lebesgue(sp), indef}});
  ovmkit::write_json_file("/tmp/ovmkit_indef.json", ovmkit::to_json(bad));
  auto r = run("rn --ovm /tmp/ovmkit_indef.json");
  CHECK(r.code == 1);
  CHECK(r.output.find("positive") != std::string::npos);
}

TEST_CASE("the tolerance environment override is honored") {
  // A generous tolerance accepts a slightly perturbed witness; the default
  // rejects it.
  ovmkit::Json j = ovmkit::read_json_file(fix("channel_identity2.json"));
  j["kraus"][0][0][0][0] = 0.9999;  // K ~ diag(0.9999, 1)
  ovmkit::write_json_file("/tmp/ovmkit_near_identity.json", j);
  std::string args = "clean-verify --nu1 " + fix("ovm_m2.json") + " --nu2 " +
                     fix("ovm_m2.json") + " --channel /tmp/ovmkit_near_identity.json";
  CHECK(run(args).code == 1);
  int status = std::system(("OVMKIT_TOL=0.1 " + kCli + " " + args + " > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(status) == 0);
}

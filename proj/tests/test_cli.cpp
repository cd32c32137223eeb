#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(DUFFING_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST_CASE("omega command") {
  const Run zero = cli("omega --lambda 0");
  CHECK(zero.code == 0);
  const auto j = nlohmann::json::parse(zero.out);
  CHECK(j["Omega"].get<double>() == 1.0);

  const Run one = cli("omega --lambda 1");
  CHECK(one.code == 0);
  const auto k = nlohmann::json::parse(one.out);
  CHECK(k["Omega"].get<double>() == doctest::Approx(1.4306).epsilon(1e-3));
  CHECK(k["cubic_residual"].get<double>() < 1e-10);

  CHECK(cli("omega --m -1").code == 2);
  CHECK(cli("omega --lambda nope").code == 2);
  CHECK(cli("omega --m 2").code == 2);
  CHECK(cli("omega --m 2 --convention literal").code == 0);
  CHECK(cli("").code == 2);
}

TEST_CASE("omega CSV output") {
  const Run r = cli("omega --lambda 0.5 --format csv");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("m,omega,lambda,Omega,", 0) == 0);
}

TEST_CASE("stability command") {
  const Run r = cli("stability --alpha-min 0 --alpha-max 0.3 --steps 301");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("alpha,re_nu1,im_nu1,re_nu2,im_nu2,re_nu3,im_nu3,re_nu4,im_nu4\n", 0) == 0);
  CHECK(cli("stability --alpha-max 0.01").code == 1);
  CHECK(cli("stability --mode engine_derived --alpha-max 0.5").code == 1);
  CHECK(cli("stability --alpha-min 0.3 --alpha-max 0.1").code == 2);
  CHECK(cli("stability --mode sideways").code == 2);
}

TEST_CASE("stability summary goes to stdout with an output file") {
  const std::string path = "cli_stability_test.csv";
  const Run r = cli("stability --mode engine_derived --alpha-max 0.5 --out " + path);
  CHECK(r.code == 1);
  CHECK(r.out.find("no transition in range") != std::string::npos);
  CHECK(r.out.find("mode=engine_derived") != std::string::npos);
  CHECK(r.out.find("discrepancy vs reference alpha_crit 0.1365") != std::string::npos);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("alpha,", 0) == 0);
  std::remove(path.c_str());
}

TEST_CASE("verify command") {
  const Run h2 = cli("verify --suite h2 --lambda 1");
  CHECK(h2.code == 0);
  CHECK(nlohmann::json::parse(h2.out)["h2_offdiag_max"].get<double>() < 1e-12);

  const Run liou = cli("verify --suite liouville --lambda 0");
  CHECK(liou.code == 0);
  CHECK(nlohmann::json::parse(liou.out)["liouville_residual"].get<double>() < 1e-10);

  CHECK(cli("verify --suite commutator --lambda 0.3 --alpha-fixed").code == 0);
  CHECK(cli("verify --suite commutator --lambda 0.3 --alpha-fixed --mode paper_literal").code == 1);
  CHECK(cli("verify --suite unknown").code == 2);
}

TEST_CASE("exact and rho commands") {
  const Run ex = cli("exact --lambda 0 --nfock 64");
  CHECK(ex.code == 0);
  const auto j = nlohmann::json::parse(ex.out);
  CHECK(j["energies"].back()[2].get<double>() == doctest::Approx(2.5).epsilon(1e-12));
  for (const auto& c : j["converged"]) CHECK(c.get<bool>());

  CHECK(cli("exact --lambda 1 --nfock 16").code == 1);

  const Run rho = cli("rho --lambda 0 --omega0 1");
  CHECK(rho.code == 0);
  CHECK(std::abs(nlohmann::json::parse(rho.out)["kurtosis_excess"].get<double>()) < 1e-10);
}

TEST_CASE("config file with command-line override") {
  const std::string path = "cli_config_test.json";
  {
    std::ofstream f(path);
    f << R"({"lambda": 0.5, "format": "json"})";
  }
  const auto from_file = nlohmann::json::parse(cli("omega --config " + path).out);
  CHECK(from_file["lambda"].get<double>() == 0.5);
  const auto overridden = nlohmann::json::parse(cli("omega --config " + path + " --lambda 2").out);
  CHECK(overridden["lambda"].get<double>() == 2.0);
  {
    std::ofstream f(path);
    f << "{not json";
  }
  CHECK(cli("omega --config " + path).code == 2);
  std::remove(path.c_str());
}

TEST_CASE("output is deterministic") {
  CHECK(cli("stability --steps 51").out == cli("stability --steps 51").out);
  CHECK(cli("verify --suite rho --lambda 0.1").out == cli("verify --suite rho --lambda 0.1").out);
}

// padyn: command-line front end for the orbit/variety checker.
//
// Exit codes: 0 Finite, 1 InvariantCandidate, 2 Inconclusive,
// 3 malformed input or usage, 4 a hypothesis of the analysis fails,
// 5 precision exhausted in a standalone computation.

#include <padyn/io.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using padyn::io::json;

constexpr int kExitInput = 3;
constexpr int kExitValidation = 4;
constexpr int kExitPrecision = 5;

struct Overrides {
  std::optional<long> precision, truncation, max_iter;
};

padyn::io::ProblemFile load(const std::string& path, const Overrides& o) {
  std::ifstream in(path);
  if (!in) throw padyn::io::InputError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  auto pf = padyn::io::parse_problem(buf.str(), path);
  if (o.precision) pf.precision = *o.precision;
  if (o.truncation) pf.truncation = *o.truncation;
  if (o.max_iter) pf.max_iterations = *o.max_iter;
  if (pf.precision < 1 || pf.truncation < 1 || pf.max_iterations < 0) {
    throw padyn::io::InputError("flags: precision and truncation must be >= 1, max-iter >= 0");
  }
  return pf;
}

std::size_t checked_index(const padyn::io::ProblemFile& pf, long i) {
  if (i < 0 || static_cast<std::size_t>(i) >= pf.polynomials.size()) {
    throw padyn::io::InputError("--map-index " + std::to_string(i) + " is out of range (file has " +
                                std::to_string(pf.polynomials.size()) + " polynomials)");
  }
  return static_cast<std::size_t>(i);
}

void emit(const json& doc, const std::string& report_path) {
  const std::string text = doc.dump(2) + "\n";
  if (report_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(report_path, std::ios::binary);
  if (!out) throw padyn::io::InputError(report_path + ": cannot write report");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orbits of split polynomial maps over Q_p against subvarieties"};
  app.require_subcommand(1);

  std::string file, report;
  Overrides over;
  long map_index = 0, steps = 20;

  auto* check = app.add_subcommand("check", "analyze a problem file and print the report");
  check->add_option("file", file, "problem file")->required();
  check->add_option("--precision", over.precision, "working precision N (p-adic digits)");
  check->add_option("--truncation", over.truncation, "series truncation order T");
  check->add_option("--max-iter", over.max_iter, "direct orbit scan length N_max");
  check->add_option("--report", report, "write the report here instead of standard output");

  auto* lin = app.add_subcommand("linearize", "print the linearizing series at the fixed point of one map");
  lin->add_option("file", file, "problem file")->required();
  lin->add_option("--map-index", map_index, "0-based index of the polynomial")->required();
  lin->add_option("--precision", over.precision, "working precision N");
  lin->add_option("--truncation", over.truncation, "series truncation order T");

  auto* fps = app.add_subcommand("fixed-points", "list the fixed points of one map in Z_p");
  fps->add_option("file", file, "problem file")->required();
  fps->add_option("--map-index", map_index, "0-based index of the polynomial")->required();
  fps->add_option("--precision", over.precision, "working precision N");

  auto* orb = app.add_subcommand("orbit", "print the orbit of the start point");
  orb->add_option("file", file, "problem file")->required();
  orb->add_option("--steps", steps, "number of iterations")->required()->check(CLI::NonNegativeNumber);
  orb->add_option("--precision", over.precision, "working precision N");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    const auto pf = load(file, over);
    if (*check) {
      const auto spec = padyn::io::to_system(pf);
      const auto r = padyn::analyze(spec);
      emit(padyn::io::report_json(pf, spec, r), report);
      return padyn::io::exit_code(r.overall);
    }
    const padyn::PadicContext ctx(pf.prime, pf.precision);
    if (*lin) {
      const std::size_t i = checked_index(pf, map_index);
      const auto p = padyn::io::to_polynomial(ctx, pf.polynomials[i]);
      const auto x = padyn::io::to_padic(ctx, pf.start[i]);
      const auto alpha = pf.fixed_points ? padyn::io::to_padic(ctx, (*pf.fixed_points)[i])
                                         : padyn::discover_fixed_point(p, x);
      padyn::Linearization l = [&] {
        try {
          return padyn::linearize(p, alpha, pf.truncation);
        } catch (const padyn::DomainError& e) {
          throw padyn::ValidationError(e.what());
        }
      }();
      emit(padyn::io::linearization_json(l, i), "");
      return 0;
    }
    if (*fps) {
      const std::size_t i = checked_index(pf, map_index);
      emit(padyn::io::fixed_points_json(padyn::io::to_polynomial(ctx, pf.polynomials[i]), i), "");
      return 0;
    }
    std::vector<padyn::Polynomial> maps;
    std::vector<padyn::PadicNumber> start;
    std::vector<std::optional<padyn::PadicNumber>> alphas;
    for (std::size_t i = 0; i < pf.polynomials.size(); ++i) {
      maps.push_back(padyn::io::to_polynomial(ctx, pf.polynomials[i]));
      start.push_back(padyn::io::to_padic(ctx, pf.start[i]));
      if (pf.fixed_points) {
        alphas.push_back(padyn::io::to_padic(ctx, (*pf.fixed_points)[i]));
      } else {
        try {
          alphas.push_back(padyn::discover_fixed_point(maps.back(), start.back()));
        } catch (const padyn::ValidationError&) {
          alphas.push_back(std::nullopt);
        }
      }
    }
    emit(padyn::io::orbit_json(maps, start, alphas, steps), "");
    return 0;
  } catch (const padyn::io::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const padyn::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const padyn::PrecisionError& e) {
    std::cerr << "precision error: " << e.what() << "\n";
    return kExitPrecision;
  } catch (const padyn::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qesdx/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"quasi-exactly solvable sextic models and their chained partners"};

  std::string job_path;
  std::string out_path;
  std::string csv_path;
  double tolerance = 0.0;
  app.add_option("--job", job_path, "job description file, or - for stdin")
      ->required();
  app.add_option("--out", out_path, "write the JSON report here");
  app.add_option("--csv", csv_path, "write sampled grid data here");
  app.add_option("--tolerance", tolerance, "residual acceptance bound");

  CLI11_PARSE(app, argc, argv);

  std::string text;
  if (job_path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    text = buf.str();
  } else {
    std::ifstream in(job_path);
    if (!in) {
      std::cerr << "error: cannot open job file " << job_path << "\n";
      return 1;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }

  qesdx::Job job;
  try {
    job = qesdx::parse_job(text);
  } catch (const qesdx::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (!out_path.empty()) job.out_path = out_path;
  if (!csv_path.empty()) job.csv_path = csv_path;

  qesdx::Tolerances tol;
  if (tolerance > 0.0) tol.residual = tolerance;

  qesdx::RunOutcome outcome = qesdx::run_job(job, tol);

  if (!job.out_path.empty()) {
    std::ofstream out(job.out_path);
    if (!out) {
      std::cerr << "error: cannot write " << job.out_path << "\n";
      return 1;
    }
    out << outcome.report.dump(2) << "\n";
  }
  if (!job.csv_path.empty() && !outcome.csv.empty()) {
    std::ofstream out(job.csv_path);
    if (!out) {
      std::cerr << "error: cannot write " << job.csv_path << "\n";
      return 1;
    }
    out << outcome.csv;
  }

  std::cout << outcome.text;
  return outcome.exit_code;
}

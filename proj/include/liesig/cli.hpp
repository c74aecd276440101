#pragma once

#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "liesig/bch.hpp"
#include "liesig/codegen.hpp"
#include "liesig/http.hpp"
#include "liesig/io.hpp"
#include "liesig/logsig.hpp"
#include "liesig/service.hpp"

#include "CLI11.hpp"

namespace liesig::cli {

namespace detail {

inline std::string read_all(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::string read_source(const std::string& name, std::istream& stdin_stream) {
  if (name == "-") return read_all(stdin_stream);
  std::ifstream f(name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + name + "'");
  return read_all(f);
}

inline PathPoints read_path(const std::string& input, std::optional<int> dim, std::istream& in) {
  PathPoints path = parse_path_csv(read_source(input, in));
  if (dim && *dim != path.dim())
    throw std::invalid_argument("input has " + std::to_string(path.dim()) + " columns but --dim is " +
                                std::to_string(*dim));
  return path;
}

inline BchTable bch_for_level(int m, const std::string& file) {
  if (file.empty()) return compute_bch_table(m);
  std::ifstream f(file);
  if (!f) throw std::runtime_error("cannot open '" + file + "'");
  BchTable table = load_bch_table(f, m);
  if (table.level() < m)
    throw std::invalid_argument("BCH file only reaches level " + std::to_string(table.level()));
  return table;
}

inline void print_flat(std::ostream& out, const Json& payload) {
  const auto& values = payload.at("values");
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? " " : "") << liesig::detail::shortest(values[i].get<double>());
  out << '\n';
}

inline void print_payload(std::ostream& out, const Json& payload, bool flat) {
  if (flat) print_flat(out, payload);
  else out << payload.dump() << '\n';
}

inline std::string codegen_header(const ExpressionProgram& prog, bool cse, const std::string& bch_file) {
  std::ostringstream os;
  os << "// liesig codegen: segment join out = log(exp(a) exp(s)) in Lyndon coordinates\n"
     << "// dim=" << prog.dim << " level=" << prog.level << " logsig_size=" << prog.logsig_size()
     << " inputs=" << prog.input_count() << " intermediates=" << prog.intermediates.size()
     << " cse=" << (cse ? "on" : "off") << " bch=" << (bch_file.empty() ? "computed" : "file") << '\n';
  return os.str();
}

}  // namespace detail

/// Runs one command line. Returns the process exit status: 0 on success,
/// 1 on a failed computation, 2 on a usage error. Diagnostics are one line.
inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Signatures and log signatures of piecewise-linear paths", "liesig"};
  app.require_subcommand(1);

  std::string input = "-";
  std::optional<int> dim_override;
  int dim = 2, level = 2;
  std::string method = "bch", basis_name = "lyndon", order_name = "lyndon", out_file, bch_file, format = "lines";
  std::optional<std::string> static_dir;
  std::string host = "127.0.0.1";
  int port = kDefaultPort;
  bool flat = false, no_cse = false;

  auto add_input = [&](CLI::App* c) {
    c->add_option("--input", input, "Path CSV file, or - for standard input")->capture_default_str();
    c->add_option("--dim", dim_override, "Expected dimension (checked against the input)")->check(CLI::PositiveNumber);
    c->add_option("--level", level, "Truncation level")->required()->check(CLI::PositiveNumber);
    c->add_flag("--flat", flat, "Print whitespace-separated values only");
  };

  auto* sig = app.add_subcommand("sig", "Truncated signature of a path");
  add_input(sig);

  auto* logsig = app.add_subcommand("logsig", "Log signature of a path");
  add_input(logsig);
  logsig->add_option("--method", method, "bch or tensor")->check(CLI::IsMember({"bch", "tensor"}))->capture_default_str();
  logsig->add_option("--basis", basis_name, "lyndon, coropa or hall")
      ->check(CLI::IsMember({"lyndon", "coropa", "hall"}))
      ->capture_default_str();
  logsig->add_option("--bch-file", bch_file, "BCH coefficient file to use instead of derived coefficients");

  auto* basis = app.add_subcommand("basis", "Print a Hall basis, one element per line");
  basis->add_option("--dim", dim, "Dimension")->required()->check(CLI::PositiveNumber);
  basis->add_option("--level", level, "Truncation level")->required()->check(CLI::PositiveNumber);
  basis->add_option("--order", order_name, "lyndon, coropa or hall")
      ->check(CLI::IsMember({"lyndon", "coropa", "hall"}))
      ->capture_default_str();

  auto* size = app.add_subcommand("sizes", "Print the signature and log signature sizes");
  size->add_option("--dim", dim, "Dimension")->required()->check(CLI::PositiveNumber);
  size->add_option("--level", level, "Truncation level")->required()->check(CLI::PositiveNumber);

  auto* bch = app.add_subcommand("bch", "Print BCH coefficients in the Lyndon basis on two letters");
  bch->add_option("--level", level, "Highest level")->required()->check(CLI::PositiveNumber);
  bch->add_option("--file", bch_file, "Load and validate a coefficient file instead of deriving");
  bch->add_option("--format", format, "lines (word p/q) or data (loadable file layout)")
      ->check(CLI::IsMember({"lines", "data"}))
      ->capture_default_str();

  auto* codegen = app.add_subcommand("codegen", "Emit the specialized segment-join program");
  codegen->add_option("--dim", dim, "Dimension")->required()->check(CLI::PositiveNumber);
  codegen->add_option("--level", level, "Truncation level")->required()->check(CLI::PositiveNumber);
  codegen->add_option("--out", out_file, "Output file (standard output if omitted)");
  codegen->add_option("--bch-file", bch_file, "BCH coefficient file to use instead of derived coefficients");
  codegen->add_flag("--no-cse", no_cse, "Skip common-subexpression extraction");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--host", host, "Address to bind")->capture_default_str();
  serve->add_option("--static", static_dir, "Directory of explorer assets served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "liesig: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*sig) {
      auto path = detail::read_path(input, dim_override, in);
      detail::print_payload(out, signature_json(path_signature(path, level)), flat);
    } else if (*logsig) {
      auto path = detail::read_path(input, dim_override, in);
      const auto m = parse_logsig_method(method);
      const auto order = parse_hall_order(basis_name);
      std::optional<LogSigContext> ctx;
      if (!bch_file.empty()) ctx.emplace(LogSigContext::prepare(path.dim(), level, detail::bch_for_level(level, bch_file)));
      else if (m == LogSigMethod::tensor || order != HallOrder::lyndon_foliage)
        ctx.emplace(LogSigContext{LyndonBasis::make(path.dim(), level), std::nullopt});
      else ctx.emplace(LogSigContext::prepare(path.dim(), level));
      detail::print_payload(out, logsig_payload(path, *ctx, m, order), flat);
    } else if (*basis) {
      auto b = build_hall_basis(dim, level, parse_hall_order(order_name));
      for (const auto& label : hall_labels(b)) out << label << '\n';
    } else if (*size) {
      auto s = sizes(dim, level);
      out << s.signature << ' ' << s.log_signature << '\n';
    } else if (*bch) {
      auto table = detail::bch_for_level(level, bch_file);
      if (format == "data") {
        write_bch_table(out, table);
      } else {
        auto words = LyndonBasis::make(2, level);
        for (const Word& w : words->words()) {
          Rational c = table.coefficient(w);
          out << to_string(w, 2) << ' ' << c.get_num() << '/' << c.get_den() << '\n';
        }
      }
    } else if (*codegen) {
      auto table = detail::bch_for_level(level, bch_file);
      auto prog = specialize_segment_join(dim, level, table, no_cse ? Cse::disabled : Cse::enabled);
      const std::string text = detail::codegen_header(prog, !no_cse, bch_file) + emit_source(prog);
      if (out_file.empty()) {
        out << text;
      } else {
        std::ofstream f(out_file, std::ios::binary);
        if (!f || !(f << text).flush()) throw std::runtime_error("cannot write '" + out_file + "'");
      }
    } else if (*serve) {
      httplib::Server srv;
      mount_routes(srv, std::make_shared<const LogSigService>(), static_dir);
      if (!srv.bind_to_port(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
      err << "liesig: serving on http://" << host << ':' << port << '\n';
      if (!srv.listen_after_bind()) throw std::runtime_error("server stopped unexpectedly");
    }
  } catch (const std::exception& e) {
    err << "liesig: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace liesig::cli

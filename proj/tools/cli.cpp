#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string_view>
#include <unistd.h>
#include <utility>

#include "CLI11.hpp"

#include "igkit/corpus.hpp"
#include "igkit/model.hpp"
#include "igkit/notation.hpp"
#include "igkit/profile.hpp"
#include "igkit/taxonomy.hpp"
#include "igkit/transform.hpp"
#include "igkit/validate.hpp"

namespace igkit::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::vector<std::string> files;
  std::string manifest_path;
  std::string profile_expr;
  std::vector<std::string> taxonomy_files;
  std::string level_text;
  std::string format = "shorthand";
  std::string output_path;
  bool strict = false;
};

struct Palette {
  const char* error = "";
  const char* warning = "";
  const char* info = "";
  const char* reset = "";
};

// Styling applies only when writing to a real terminal; captured streams
// in tests and redirected output stay plain.
Palette make_palette(const std::ostream& stream) {
  bool tty = (&stream == &std::cout && isatty(1) != 0) ||
             (&stream == &std::cerr && isatty(2) != 0);
  if (!tty || std::getenv("IGKIT_NO_COLOR") != nullptr) return {};
  return {"\033[31m", "\033[33m", "\033[36m", "\033[0m"};
}

const char* severity_style(const Palette& palette, Severity severity) {
  switch (severity) {
    case Severity::Error: return palette.error;
    case Severity::Warning: return palette.warning;
    case Severity::Info: return palette.info;
  }
  return "";
}

void print_diagnostic(std::ostream& os, const Palette& palette, const std::string& file,
                      const Diagnostic& d) {
  os << file << ':' << (d.statement_id.empty() ? "-" : d.statement_id) << ": "
     << severity_style(palette, d.severity) << to_string(d.severity) << palette.reset << ' '
     << d.code << ": " << d.message;
  if (d.span) os << " [" << d.span->offset << ".." << d.span->offset + d.span->length << "]";
  os << '\n';
}

std::optional<std::string> read_file(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "igkit: cannot open '" << path << "'\n";
    return std::nullopt;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

// Routes command output to --output when given, to the session stream
// otherwise.
class OutputTarget {
public:
  bool open(const std::string& path, std::ostream& fallback, std::ostream& err) {
    if (path.empty()) {
      stream_ = &fallback;
      return true;
    }
    file_.open(path, std::ios::binary);
    if (!file_) {
      err << "igkit: cannot write '" << path << "'\n";
      return false;
    }
    stream_ = &file_;
    return true;
  }

  std::ostream& stream() { return *stream_; }

private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

struct Corpus {
  std::string path;
  std::vector<SourceRecord> records;
};

// Documents parse concurrently; results keep input order.
std::optional<std::vector<Corpus>> load_corpora(const std::vector<std::string>& files,
                                                std::ostream& err) {
  if (files.empty()) {
    err << "igkit: no input files\n";
    return std::nullopt;
  }
  std::vector<Corpus> corpora;
  std::vector<std::string> texts;
  for (const auto& path : files) {
    auto text = read_file(path, err);
    if (!text) return std::nullopt;
    texts.push_back(std::move(*text));
  }
  std::vector<std::future<std::vector<SourceRecord>>> parses;
  parses.reserve(texts.size());
  for (const auto& text : texts)
    parses.push_back(std::async(std::launch::async, [&text] { return parse_document(text); }));
  for (std::size_t i = 0; i < files.size(); ++i)
    corpora.push_back({files[i], parses[i].get()});
  return corpora;
}

// Prints parse diagnostics of every record; true when any is an error.
bool report_parse_diagnostics(const std::vector<Corpus>& corpora, std::ostream& err) {
  Palette palette = make_palette(err);
  bool any_error = false;
  for (const auto& corpus : corpora) {
    for (const auto& record : corpus.records) {
      for (const auto& d : record.diagnostics) {
        print_diagnostic(err, palette, corpus.path, d);
        any_error = any_error || d.severity == Severity::Error;
      }
    }
  }
  return any_error;
}

struct RegistryHolder {
  const TaxonomyRegistry* registry = &TaxonomyRegistry::builtin();
  std::optional<TaxonomyRegistry> owned;
};

bool load_taxonomies(const std::vector<std::string>& files, RegistryHolder& holder,
                     std::ostream& err) {
  for (const auto& path : files) {
    auto text = read_file(path, err);
    if (!text) return false;
    auto parsed = parse_taxonomy_file(*text);
    if (!parsed.ok()) {
      err << "igkit: " << path << ": " << parsed.error->message << '\n';
      return false;
    }
    auto merged = holder.registry->merge(parsed.entries);
    if (!merged.ok()) {
      err << "igkit: " << path << ": " << merged.error->message << '\n';
      return false;
    }
    holder.owned = std::move(*merged.registry);
    holder.registry = &*holder.owned;
  }
  return true;
}

bool load_profile(const std::string& expr, std::optional<Profile>& profile, std::ostream& err) {
  if (expr.empty()) return true;
  auto parsed = parse_profile(expr);
  if (!parsed.ok()) {
    err << "igkit: invalid profile '" << expr << "'";
    if (!parsed.diagnostics.empty()) err << ": " << parsed.diagnostics.front().message;
    err << '\n';
    return false;
  }
  profile = std::move(*parsed.profile);
  return true;
}

// Folds manifest settings into the options: explicit flags win for the
// profile, manifest documents precede files named on the command line.
// Paths resolve relative to the manifest's directory and must exist.
bool apply_manifest(Options& opts, std::ostream& err) {
  if (opts.manifest_path.empty()) return true;
  auto text = read_file(opts.manifest_path, err);
  if (!text) return false;
  auto parsed = parse_manifest(*text);
  if (!parsed.ok()) {
    err << "igkit: " << opts.manifest_path << ": " << parsed.error << '\n';
    return false;
  }
  const CorpusManifest& manifest = *parsed.manifest;
  fs::path base = fs::path(opts.manifest_path).parent_path();
  auto resolve = [&base](const std::string& p) { return (base / p).lexically_normal().string(); };
  if (opts.profile_expr.empty()) opts.profile_expr = manifest.profile;
  std::vector<std::string> paths;
  for (const auto& t : manifest.taxonomies) paths.push_back(resolve(t));
  for (const auto& d : manifest.documents) paths.push_back(resolve(d));
  for (const auto& p : paths) {
    if (!fs::exists(p)) {
      err << "igkit: " << opts.manifest_path << ": path '" << p << "' does not exist\n";
      return false;
    }
  }
  std::size_t split = manifest.taxonomies.size();
  opts.taxonomy_files.insert(opts.taxonomy_files.end(), paths.begin(), paths.begin() + split);
  std::vector<std::string> files(paths.begin() + split, paths.end());
  files.insert(files.end(), opts.files.begin(), opts.files.end());
  opts.files = std::move(files);
  return true;
}

void write_record(std::ostream& os, const SourceRecord& record) {
  os << "ID: " << record.id << '\n';
  if (record.parsed) os << serialize(record.parsed) << '\n';
  if (record.alternate) os << "ALT: " << serialize(record.alternate) << '\n';
}

void write_document(std::ostream& os, const std::vector<SourceRecord>& records) {
  bool first = true;
  for (const auto& record : records) {
    if (!record.parsed && !record.alternate) continue;
    if (!first) os << '\n';
    first = false;
    write_record(os, record);
  }
}

std::vector<SourceRecord> merge_records(const std::vector<Corpus>& corpora) {
  std::vector<SourceRecord> all;
  for (const auto& corpus : corpora)
    all.insert(all.end(), corpus.records.begin(), corpus.records.end());
  return all;
}

int cmd_parse(const Options& opts, std::ostream& out, std::ostream& err) {
  auto corpora = load_corpora(opts.files, err);
  if (!corpora) return 2;
  OutputTarget target;
  if (!target.open(opts.output_path, out, err)) return 2;
  bool failed = report_parse_diagnostics(*corpora, err);
  if (opts.format == "tree") {
    target.stream() << export_corpus(merge_records(*corpora));
  } else {
    bool first = true;
    for (const auto& corpus : *corpora) {
      if (!first) target.stream() << '\n';
      first = false;
      write_document(target.stream(), corpus.records);
    }
  }
  return failed ? 1 : 0;
}

int cmd_validate(const Options& opts, std::ostream& out, std::ostream& err) {
  RegistryHolder registry;
  if (!load_taxonomies(opts.taxonomy_files, registry, err)) return 2;
  ValidationOptions vopts;
  vopts.registry = registry.registry;
  vopts.strict_specificity = opts.strict;
  if (!load_profile(opts.profile_expr, vopts.profile, err)) return 2;
  auto corpora = load_corpora(opts.files, err);
  if (!corpora) return 2;

  std::vector<std::future<std::vector<ValidationReport>>> runs;
  runs.reserve(corpora->size());
  for (const auto& corpus : *corpora) {
    runs.push_back(std::async(std::launch::async, [&corpus, &vopts] {
      std::vector<ValidationReport> reports;
      reports.reserve(corpus.records.size());
      for (const auto& record : corpus.records) reports.push_back(validate(record, vopts));
      return reports;
    }));
  }

  Palette palette = make_palette(out);
  std::size_t errors = 0;
  std::size_t warnings = 0;
  for (std::size_t i = 0; i < corpora->size(); ++i) {
    const Corpus& corpus = (*corpora)[i];
    auto reports = runs[i].get();
    std::size_t file_errors = 0;
    std::size_t file_warnings = 0;
    std::size_t file_infos = 0;
    for (const auto& report : reports) {
      for (const auto& d : report.diagnostics) {
        print_diagnostic(out, palette, corpus.path, d);
        switch (d.severity) {
          case Severity::Error: ++file_errors; break;
          case Severity::Warning: ++file_warnings; break;
          case Severity::Info: ++file_infos; break;
        }
      }
    }
    out << corpus.path << ": " << reports.size() << " records, " << file_errors << " errors, "
        << file_warnings << " warnings, " << file_infos << " infos\n";
    errors += file_errors;
    warnings += file_warnings;
  }
  if (errors > 0) return 1;
  if (opts.strict && warnings > 0) return 1;
  return 0;
}

// Shared shape of decompose/project: map every parsed tree, write the
// resulting corpus as a shorthand document.
template <typename Fn>
int transform_documents(const Options& opts, std::ostream& out, std::ostream& err, Fn&& apply) {
  auto corpora = load_corpora(opts.files, err);
  if (!corpora) return 2;
  OutputTarget target;
  if (!target.open(opts.output_path, out, err)) return 2;
  bool failed = report_parse_diagnostics(*corpora, err);
  Palette palette = make_palette(err);
  bool first = true;
  for (auto& corpus : *corpora) {
    for (auto& record : corpus.records) {
      if (record.parsed) {
        StatementPtr mapped = apply(record.parsed, corpus.path, record.id, palette, failed);
        record.parsed = std::move(mapped);
      }
      if (record.alternate) {
        StatementPtr mapped = apply(record.alternate, corpus.path, record.id, palette, failed);
        record.alternate = std::move(mapped);
      }
    }
    if (!first) target.stream() << '\n';
    first = false;
    write_document(target.stream(), corpus.records);
  }
  return failed ? 1 : 0;
}

int cmd_decompose(const Options& opts, std::ostream& out, std::ostream& err) {
  return transform_documents(
      opts, out, err,
      [&err](const StatementPtr& s, const std::string& path, const std::string& id,
             const Palette& palette, bool& failed) {
        TransformResult result = decompose_combinations(s);
        for (auto d : result.diagnostics) {
          d.statement_id = id;
          print_diagnostic(err, palette, path, d);
          failed = failed || d.severity == Severity::Error;
        }
        return result.statement ? result.statement : s;
      });
}

int cmd_project(const Options& opts, std::ostream& out, std::ostream& err) {
  auto level = level_from_string(opts.level_text);
  if (!level) {
    err << "igkit: unknown level '" << opts.level_text << "'\n";
    return 2;
  }
  return transform_documents(opts, out, err,
                             [level](const StatementPtr& s, const std::string&, const std::string&,
                                     const Palette&, bool&) { return project(s, *level); });
}

int cmd_flatten(const Options& opts, std::ostream& out, std::ostream& err) {
  auto corpora = load_corpora(opts.files, err);
  if (!corpora) return 2;
  OutputTarget target;
  if (!target.open(opts.output_path, out, err)) return 2;
  bool failed = report_parse_diagnostics(*corpora, err);
  for (const auto& corpus : *corpora) {
    for (const auto& record : corpus.records) {
      if (!record.parsed) continue;
      for (const auto& pair : flatten_vertical(record.parsed)) {
        target.stream() << record.id << " depth=" << pair.depth << '\n'
                        << "  monitored: " << serialize(pair.monitored) << '\n'
                        << "  consequential: " << serialize(pair.consequential) << '\n';
      }
    }
  }
  return failed ? 1 : 0;
}

int cmd_profile(const Options& opts, std::ostream& out, std::ostream& err) {
  auto parsed = parse_profile(opts.profile_expr);
  if (!parsed.ok()) {
    err << "igkit: invalid profile '" << opts.profile_expr << "'";
    if (!parsed.diagnostics.empty()) err << ": " << parsed.diagnostics.front().message;
    err << '\n';
    return 2;
  }
  const Profile& profile = *parsed.profile;
  out << "profile: " << format_profile(profile) << '\n';
  out << "baseline: " << to_string(profile.baseline) << '\n';
  auto print_features = [&out](std::string_view label, const auto& features) {
    if (features.empty()) return;
    out << label << ':';
    for (Feature f : features) out << ' ' << to_string(f);
    out << '\n';
  };
  print_features("removed", profile.removed);
  print_features("added", profile.added);
  print_features("features", profile.expanded);
  return 0;
}

int cmd_stats(const Options& opts, std::ostream& out, std::ostream& err) {
  auto corpora = load_corpora(opts.files, err);
  if (!corpora) return 2;
  OutputTarget target;
  if (!target.open(opts.output_path, out, err)) return 2;
  bool failed = report_parse_diagnostics(*corpora, err);
  FrequencyTable table = stats(merge_records(*corpora));
  std::ostream& os = target.stream();
  os << "components:\n";
  for (const auto& [code, count] : table.components)
    os << "  " << to_string(code) << ": " << count << '\n';
  os << "implied:\n";
  for (const auto& [code, count] : table.implied)
    os << "  " << to_string(code) << ": " << count << '\n';
  if (!table.labels.empty()) {
    os << "annotations:\n";
    for (const auto& [key, count] : table.labels)
      os << "  " << key.first << (key.first == "polref" ? '=' : ':') << key.second << ": " << count
         << '\n';
  }
  if (!table.vertical_depth.empty()) {
    os << "vertical depth:\n";
    for (const auto& [depth, count] : table.vertical_depth)
      os << "  " << depth << ": " << count << '\n';
  }
  if (!table.nesting_depth.empty()) {
    os << "nesting depth:\n";
    for (const auto& [depth, count] : table.nesting_depth)
      os << "  " << depth << ": " << count << '\n';
  }
  os << "total components: " << table.total_components() << '\n';
  return failed ? 1 : 0;
}

int cmd_preprocess(const Options& opts, std::ostream& out, std::ostream& err) {
  if (opts.files.empty()) {
    err << "igkit: no input files\n";
    return 2;
  }
  OutputTarget target;
  if (!target.open(opts.output_path, out, err)) return 2;
  for (const auto& path : opts.files) {
    auto text = read_file(path, err);
    if (!text) return 2;
    for (const auto& sentence : preprocess(*text)) target.stream() << sentence << '\n';
  }
  return 0;
}

int cmd_export(const Options& opts, std::ostream& out, std::ostream& err) {
  auto corpora = load_corpora(opts.files, err);
  if (!corpora) return 2;
  OutputTarget target;
  if (!target.open(opts.output_path, out, err)) return 2;
  bool failed = report_parse_diagnostics(*corpora, err);
  target.stream() << export_corpus(merge_records(*corpora));
  return failed ? 1 : 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opts;
  CLI::App app{"Institutional Grammar 2.0 shorthand toolkit"};
  app.name("igkit");
  app.require_subcommand(1);

  auto add_files = [&opts](CLI::App* cmd, const char* help) {
    cmd->add_option("files", opts.files, help);
  };
  auto add_output = [&opts](CLI::App* cmd) {
    cmd->add_option("--output", opts.output_path, "write output to a file instead of stdout");
  };

  CLI::App* parse_cmd = app.add_subcommand("parse", "Parse documents, print canonical shorthand");
  add_files(parse_cmd, "coded documents (.ig)");
  parse_cmd->add_option("--format", opts.format, "shorthand or tree")
      ->check(CLI::IsMember({"shorthand", "tree"}));
  add_output(parse_cmd);

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Lint documents against taxonomies and a profile");
  add_files(validate_cmd, "coded documents (.ig)");
  validate_cmd->add_option("--profile", opts.profile_expr,
                           "profile expression, e.g. \"IG Core+C_Ext\"");
  validate_cmd->add_option("--taxonomy", opts.taxonomy_files,
                           "taxonomy extension file (repeatable)");
  validate_cmd->add_option("--manifest", opts.manifest_path, "project manifest file");
  validate_cmd->add_flag("--strict", opts.strict,
                         "treat warnings as errors, require leaf-level labels");

  CLI::App* decompose_cmd =
      app.add_subcommand("decompose", "Expand component combinations into atomic statements");
  add_files(decompose_cmd, "coded documents (.ig)");
  add_output(decompose_cmd);

  CLI::App* project_cmd = app.add_subcommand("project", "Project coding onto a lower level");
  add_files(project_cmd, "coded documents (.ig)");
  project_cmd->add_option("--level", opts.level_text, "target level: core, extended or logico")
      ->required();
  add_output(project_cmd);

  CLI::App* flatten_cmd =
      app.add_subcommand("flatten", "List monitored/consequential pairs with their depth");
  add_files(flatten_cmd, "coded documents (.ig)");
  add_output(flatten_cmd);

  CLI::App* profile_cmd =
      app.add_subcommand("profile", "Expand a profile expression to its feature set");
  profile_cmd->add_option("expression", opts.profile_expr, "profile expression")->required();

  CLI::App* stats_cmd = app.add_subcommand("stats", "Frequency statistics over coded corpora");
  add_files(stats_cmd, "coded documents (.ig)");
  stats_cmd->add_option("--manifest", opts.manifest_path, "project manifest file");
  add_output(stats_cmd);

  CLI::App* preprocess_cmd =
      app.add_subcommand("preprocess", "Split raw prose into candidate statements");
  add_files(preprocess_cmd, "prose text files");
  add_output(preprocess_cmd);

  CLI::App* export_cmd = app.add_subcommand("export", "Emit the igkit-1 interchange format");
  add_files(export_cmd, "coded documents (.ig)");
  export_cmd->add_option("--manifest", opts.manifest_path, "project manifest file");
  add_output(export_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  if (!apply_manifest(opts, err)) return 2;

  if (parse_cmd->parsed()) return cmd_parse(opts, out, err);
  if (validate_cmd->parsed()) return cmd_validate(opts, out, err);
  if (decompose_cmd->parsed()) return cmd_decompose(opts, out, err);
  if (project_cmd->parsed()) return cmd_project(opts, out, err);
  if (flatten_cmd->parsed()) return cmd_flatten(opts, out, err);
  if (profile_cmd->parsed()) return cmd_profile(opts, out, err);
  if (stats_cmd->parsed()) return cmd_stats(opts, out, err);
  if (preprocess_cmd->parsed()) return cmd_preprocess(opts, out, err);
  if (export_cmd->parsed()) return cmd_export(opts, out, err);
  err << "igkit: no command\n";
  return 2;
}

}  // namespace igkit::cli

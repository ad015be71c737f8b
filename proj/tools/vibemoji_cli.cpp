// vibemoji: operator entry point for the relay server and its data files.
//
//   vibemoji serve --config <path>
//   vibemoji catalog validate <path>
//   vibemoji simulate --catalog <path> --history <path> --select <modality>=<id> [--select ...]
//                     [--alpha x --beta y]
//   vibemoji history dump --data-dir <path> --user <id>
//
// Exit codes: 0 success, 1 validation failure, 2 I/O or configuration error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vibemoji/catalog.hpp"
#include "vibemoji/config.hpp"
#include "vibemoji/error.hpp"
#include "vibemoji/history.hpp"
#include "vibemoji/relay.hpp"
#include "vibemoji/server.hpp"
#include "vibemoji/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buf.str();
}

int run_serve(const std::string& config_path) {
  using namespace vibemoji;
  ServerConfig cfg;
  try {
    cfg = load_server_config(config_path);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: config " << config_path << ": " << e.what() << '\n';
    return kExitIo;
  }
  const auto catalog_text = read_file(cfg.catalog_path.string());
  if (!catalog_text) {
    std::cerr << "error: cannot read catalog " << cfg.catalog_path.string() << '\n';
    return kExitIo;
  }
  Catalog catalog;
  try {
    catalog = parse_catalog(*catalog_text);
  } catch (const Error& e) {
    std::cerr << "error: catalog " << cfg.catalog_path.string() << ": " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    RelayOptions options;
    options.data_dir = cfg.data_dir;
    options.weights = cfg.weights;
    if (cfg.webhook_url) options.notifier = std::make_shared<WebhookNotifier>(*cfg.webhook_url);
    Relay relay(catalog, cfg.pairs, options);

    ServerOptions server_options;
    server_options.listen_address = cfg.listen_address;
    server_options.http_address = cfg.http_address;
    server_options.catalog_document = serialize_catalog(catalog);
    Server server(relay, server_options);
    server.start();
    server.wait_for_signal([&server] {
      std::cout << "listening " << server.tcp_address() << '\n';
      if (auto http = server.http_address()) std::cout << "http " << *http << '\n';
      std::cout.flush();
    });
    std::cout << "stopped\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

int run_catalog_validate(const std::string& path) {
  const auto text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read " << path << '\n';
    return kExitIo;
  }
  const auto problems = vibemoji::validate_catalog_document(*text);
  if (problems.empty()) {
    std::cout << path << ": ok\n";
    return kExitOk;
  }
  for (const auto& p : problems) std::cout << path << ": " << p << '\n';
  return kExitInvalid;
}

int run_simulate(const std::string& catalog_path, const std::string& history_path,
                 const std::vector<std::string>& selects, double alpha, double beta) {
  using namespace vibemoji;
  const auto catalog_text = read_file(catalog_path);
  if (!catalog_text) {
    std::cerr << "error: cannot read catalog " << catalog_path << '\n';
    return kExitIo;
  }
  std::string script;
  if (!history_path.empty()) {
    auto text = read_file(history_path);
    if (!text) {
      std::cerr << "error: cannot read history " << history_path << '\n';
      return kExitIo;
    }
    script = std::move(*text);
  }
  try {
    const Catalog catalog = parse_catalog(*catalog_text);
    std::vector<ElementRef> selection;
    for (const auto& s : selects) {
      const auto eq = s.find('=');
      const auto modality = parse_modality(std::string_view(s).substr(0, eq));
      if (eq == std::string::npos || !modality) {
        std::cerr << "error: --select expects <modality>=<id>, got \"" << s << "\"\n";
        return kExitIo;
      }
      selection.push_back({*modality, s.substr(eq + 1)});
    }
    const Weights weights{alpha, beta};
    weights.validate();
    const PairCounts history = replay_history_script(script, catalog);
    std::cout << format_simulation(simulate(catalog, history, selection, weights));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}

int run_history_dump(const std::string& data_dir, const std::string& user) {
  using namespace vibemoji;
  const auto log = std::filesystem::path(data_dir) / "events.log";
  if (!std::filesystem::is_directory(data_dir)) {
    std::cerr << "error: data directory " << data_dir << " does not exist\n";
    return kExitIo;
  }
  try {
    HistoryStore store(std::filesystem::exists(log) ? log : std::filesystem::path{});
    const auto summary = store.usage_summary(user);
    std::cout << "user " << user << '\n'
              << "messages_sent " << summary.messages_sent << '\n'
              << "emoticons_sent " << summary.emoticons_sent << '\n'
              << "median_timeframe_ms "
              << (summary.median_timeframe_ms ? std::to_string(*summary.median_timeframe_ms) : "-")
              << '\n';
    const auto events = store.events(user);
    for (const auto& t : authoring_timeframes(user, events)) {
      std::cout << "timeframe " << t.start_ts << ' ' << t.send_ts << ' ' << t.duration_ms() << '\n';
    }
    const PairCounts counts = store.snapshot(user);
    for (const auto& [key, count] : counts.entries()) {
      std::cout << "pair " << to_string(key.first.modality) << '=' << key.first.id << ' '
                << to_string(key.second.modality) << '=' << key.second.id << ' ' << count << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vibemoji relay server and tools"};
  app.require_subcommand(1);

  std::string config_path;
  auto* serve = app.add_subcommand("serve", "run the relay server");
  serve->add_option("--config", config_path, "server config file")->required();

  auto* catalog = app.add_subcommand("catalog", "catalog tools");
  catalog->require_subcommand(1);
  std::string validate_path;
  auto* validate = catalog->add_subcommand("validate", "check a catalog document");
  validate->add_option("path", validate_path, "catalog document")->required();

  std::string sim_catalog;
  std::string sim_history;
  std::vector<std::string> sim_selects;
  double alpha = vibemoji::Weights{}.alpha;
  double beta = vibemoji::Weights{}.beta;
  auto* simulate = app.add_subcommand("simulate", "print the ranking table for a selection");
  simulate->add_option("--catalog", sim_catalog, "catalog document")->required();
  simulate->add_option("--history", sim_history, "script of sends in codec format");
  simulate->add_option("--select", sim_selects, "<modality>=<id>, once or twice")->required();
  simulate->add_option("--alpha", alpha, "emotional similarity weight");
  simulate->add_option("--beta", beta, "usage TF-IDF weight");

  auto* history = app.add_subcommand("history", "usage history tools");
  history->require_subcommand(1);
  std::string data_dir;
  std::string user;
  auto* dump = history->add_subcommand("dump", "print a user's usage summary and pair counts");
  dump->add_option("--data-dir", data_dir, "server data directory")->required();
  dump->add_option("--user", user, "user id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  if (serve->parsed()) return run_serve(config_path);
  if (validate->parsed()) return run_catalog_validate(validate_path);
  if (simulate->parsed()) return run_simulate(sim_catalog, sim_history, sim_selects, alpha, beta);
  if (dump->parsed()) return run_history_dump(data_dir, user);
  return kExitIo;
}

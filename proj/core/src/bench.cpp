#include "probsens/bench.hpp"

#include "probsens/errors.hpp"

#include <json.hpp>

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace probsens {

const char* to_string(BenchResult::Status s) {
    switch (s) {
    case BenchResult::Status::Match: return "match";
    case BenchResult::Status::Mismatch: return "MISMATCH";
    case BenchResult::Status::SoftMatch: return "match (soft)";
    case BenchResult::Status::SoftMismatch: return "differs (soft)";
    case BenchResult::Status::Reported: return "reported";
    case BenchResult::Status::Timeout: return "TO";
    case BenchResult::Status::CapExceeded: return "cap exceeded";
    case BenchResult::Status::Failed: return "error";
    }
    return "error";
}

std::vector<BenchRow> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Validation, "cannot open manifest " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, "manifest " + path + ": " + e.what());
    }
    auto base = std::filesystem::path(path).parent_path();
    std::vector<BenchRow> rows;
    for (const auto& r : j.at("rows")) {
        BenchRow row;
        row.program = (base / r.at("program").get<std::string>()).string();
        row.name = r.value("name", std::filesystem::path(row.program).stem().string());
        row.target = r.at("target").get<std::string>();
        row.wrt = r.at("wrt").get<std::string>();
        row.method = parse_method(r.value("method", std::string("auto")));
        if (r.contains("expected_rec") && !r["expected_rec"].is_null())
            row.expected_rec = r["expected_rec"].get<std::size_t>();
        row.hard = r.value("hard", false);
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

struct Child {
    std::size_t index;
    pid_t pid;
    int fd;
    std::chrono::steady_clock::time_point start;
    std::string output;
    bool eof = false;
};

[[noreturn]] void child_main(const BenchRow& row, const BenchOptions& options, int fd) {
    nlohmann::json j;
    try {
        AnalysisOptions ao;
        ao.target = row.target;
        ao.wrt = row.wrt;
        ao.method = row.method;
        ao.cap = options.cap;
        auto rep = analyze_file(row.program, ao);
        j["rec"] = rep.rec_count;
        j["method"] = rep.method;
        j["exit"] = 0;
    } catch (const Error& e) {
        j["exit"] = exit_code(e.kind());
        j["message"] = e.what();
    } catch (const std::exception& e) {
        j["exit"] = 1;
        j["message"] = e.what();
    }
    std::string s = j.dump();
    const char* p = s.data();
    std::size_t left = s.size();
    while (left > 0) {
        ssize_t w = ::write(fd, p, left);
        if (w <= 0)
            break;
        p += w;
        left -= static_cast<std::size_t>(w);
    }
    ::close(fd);
    ::_exit(0);
}

void classify_result(BenchResult& r) {
    if (!r.rec) {
        r.status = r.exit_code == exit_code(ErrorKind::CapExceeded) ? BenchResult::Status::CapExceeded
                                                                      : BenchResult::Status::Failed;
        return;
    }
    if (!r.row.expected_rec) {
        r.status = BenchResult::Status::Reported;
        return;
    }
    bool same = *r.rec == *r.row.expected_rec;
    if (r.row.hard)
        r.status = same ? BenchResult::Status::Match : BenchResult::Status::Mismatch;
    else
        r.status = same ? BenchResult::Status::SoftMatch : BenchResult::Status::SoftMismatch;
}

void finish(Child& c, BenchResult& r) {
    int status = 0;
    ::waitpid(c.pid, &status, 0);
    ::close(c.fd);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - c.start).count();
    try {
        auto j = nlohmann::json::parse(c.output);
        r.exit_code = j.value("exit", 1);
        if (j.contains("rec"))
            r.rec = j["rec"].get<std::size_t>();
        r.message = j.value("message", std::string());
    } catch (const nlohmann::json::exception&) {
        r.exit_code = 1;
        r.message = WIFSIGNALED(status) ? "terminated by signal " + std::to_string(WTERMSIG(status))
                                        : "no result from worker";
    }
    classify_result(r);
}

}  // namespace

std::vector<BenchResult> run_bench(const std::vector<BenchRow>& rows, const BenchOptions& options) {
    std::vector<BenchResult> results(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        results[i].row = rows[i];
    const unsigned jobs = std::max(1U, options.jobs);
    std::vector<Child> active;
    std::size_t next = 0;
    std::fflush(nullptr);
    while (next < rows.size() || !active.empty()) {
        while (next < rows.size() && active.size() < jobs) {
            int fds[2];
            if (::pipe(fds) != 0)
                throw Error(ErrorKind::Internal, std::string("pipe: ") + std::strerror(errno));
            pid_t pid = ::fork();
            if (pid < 0)
                throw Error(ErrorKind::Internal, std::string("fork: ") + std::strerror(errno));
            if (pid == 0) {
                ::close(fds[0]);
                child_main(rows[next], options, fds[1]);
            }
            ::close(fds[1]);
            active.push_back({next, pid, fds[0], std::chrono::steady_clock::now(), {}, false});
            ++next;
        }
        std::vector<pollfd> pfds;
        for (const auto& c : active)
            pfds.push_back({c.fd, POLLIN, 0});
        ::poll(pfds.data(), pfds.size(), 50);
        for (std::size_t k = 0; k < active.size(); ++k) {
            if (pfds[k].revents & (POLLIN | POLLHUP | POLLERR)) {
                char buf[4096];
                ssize_t n = ::read(active[k].fd, buf, sizeof buf);
                if (n > 0)
                    active[k].output.append(buf, static_cast<std::size_t>(n));
                else
                    active[k].eof = true;
            }
        }
        auto now = std::chrono::steady_clock::now();
        for (auto it = active.begin(); it != active.end();) {
            auto& r = results[it->index];
            double elapsed = std::chrono::duration<double>(now - it->start).count();
            if (it->eof) {
                finish(*it, r);
                it = active.erase(it);
            } else if (elapsed > options.timeout_seconds) {
                ::kill(it->pid, SIGKILL);
                ::waitpid(it->pid, nullptr, 0);
                ::close(it->fd);
                r.status = BenchResult::Status::Timeout;
                r.seconds = elapsed;
                r.message = "timeout";
                it = active.erase(it);
            } else {
                ++it;
            }
        }
    }
    return results;
}

std::string bench_table(const std::vector<BenchResult>& results) {
    std::ostringstream os;
    auto cell = [&](const std::string& s, int w) { os << std::left << std::setw(w) << s << " "; };
    cell("Benchmark", 22);
    cell("Sensitivity", 34);
    cell("Method", 8);
    cell("Expected", 9);
    cell("Rec", 6);
    cell("RT", 8);
    os << "Status\n";
    for (const auto& r : results) {
        cell(r.row.name, 22);
        cell("d/d" + r.row.wrt + " E(" + r.row.target + ")", 34);
        cell(to_string(r.row.method), 8);
        cell(r.row.expected_rec ? std::to_string(*r.row.expected_rec) + (r.row.hard ? "" : "*") : "-", 9);
        cell(r.status == BenchResult::Status::Timeout ? "TO" : r.rec ? std::to_string(*r.rec) : "-", 6);
        std::ostringstream t;
        t << std::fixed << std::setprecision(2) << r.seconds;
        cell(r.status == BenchResult::Status::Timeout ? "TO" : t.str(), 8);
        os << to_string(r.status);
        if (r.status == BenchResult::Status::Failed || r.status == BenchResult::Status::CapExceeded)
            os << " (exit " << r.exit_code << ": " << r.message << ")";
        os << "\n";
    }
    os << "* soft expectation (re-authored program), reported only\n";
    return os.str();
}

std::string bench_json(const std::vector<BenchResult>& results) {
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json e;
        e["name"] = r.row.name;
        e["program"] = r.row.program;
        e["target"] = r.row.target;
        e["wrt"] = r.row.wrt;
        e["method"] = to_string(r.row.method);
        e["expected_rec"] = r.row.expected_rec ? nlohmann::ordered_json(*r.row.expected_rec) : nullptr;
        e["hard"] = r.row.hard;
        e["rec"] = r.rec ? nlohmann::ordered_json(*r.rec) : nullptr;
        e["seconds"] = r.seconds;
        e["status"] = to_string(r.status);
        e["exit"] = r.exit_code;
        if (!r.message.empty())
            e["message"] = r.message;
        j["rows"].push_back(e);
    }
    j["passed"] = bench_passed(results);
    return j.dump(2);
}

bool bench_passed(const std::vector<BenchResult>& results) {
    for (const auto& r : results)
        if (r.row.hard && r.status != BenchResult::Status::Match)
            return false;
    return true;
}

}  // namespace probsens

#include "fjsp/instance.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fjsp {

int Operation::min_time() const {
    int best = std::numeric_limits<int>::max();
    for (const auto& opt : eligible) best = std::min(best, opt.time);
    return best;
}

int FjsspInstance::total_operations() const {
    int count = 0;
    for (const auto& job : jobs) count += static_cast<int>(job.operations.size());
    return count;
}

SetupParams SetupParams::s1(int n, int t_window) { return SetupParams{Setup::S1, n, 1, 1, t_window}; }

SetupParams SetupParams::s2(int n, int k, int t_window) { return SetupParams{Setup::S2, n, k, 1, t_window}; }

SetupParams SetupParams::s3(int n, int k, int p) { return SetupParams{Setup::S3, n, k, p, p + 1}; }

void SetupParams::validate() const {
    if (n < 1) throw std::invalid_argument("setup: n must be >= 1");
    if (k < 1 || k > n) throw std::invalid_argument("setup: k must be in [1, n]");
    if (p < 1) throw std::invalid_argument("setup: p must be >= 1");
    if (t_window < 1) throw std::invalid_argument("setup: t_window must be >= 1");
    switch (setup) {
        case Setup::S1:
            if (k != 1 || p != 1) throw std::invalid_argument("setup 1 requires k=1, p=1");
            break;
        case Setup::S2:
            if (p != 1) throw std::invalid_argument("setup 2 requires p=1");
            break;
        case Setup::S3:
            if (t_window != p + 1) throw std::invalid_argument("setup 3 requires t_window = p+1");
            break;
    }
}

FjsspInstance generate_instance(const SetupParams& params) {
    params.validate();
    const int n = params.n;
    FjsspInstance instance;
    instance.machine_count = n;
    instance.horizon = n * params.p + 1;
    instance.jobs.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Job& job = instance.jobs[static_cast<std::size_t>(i)];
        job.id = i;
        job.operations.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            Operation& op = job.operations[static_cast<std::size_t>(j)];
            op.eligible.reserve(static_cast<std::size_t>(params.k));
            // Rotated assignment: the k=1 case is a Latin square, so the
            // optimal makespan is n*p.
            for (int d = 0; d < params.k; ++d) {
                op.eligible.push_back(MachineOption{(i + j + d) % n, params.p});
            }
        }
    }
    return instance;
}

int earliest_start(const FjsspInstance& instance, int job, int op) {
    if (job < 0 || job >= static_cast<int>(instance.jobs.size())) throw std::out_of_range("earliest_start: job index");
    const auto& ops = instance.jobs[static_cast<std::size_t>(job)].operations;
    if (op < 0 || op >= static_cast<int>(ops.size())) throw std::out_of_range("earliest_start: op index");
    int total = 0;
    for (int j = 0; j < op; ++j) total += ops[static_cast<std::size_t>(j)].min_time();
    return total;
}

std::vector<std::string> validate_instance(const FjsspInstance& instance) {
    std::vector<std::string> diags;
    auto report = [&diags](const std::string& msg) { diags.push_back(msg); };

    if (instance.machine_count < 1) report("machine_count must be >= 1");
    if (instance.horizon < 1) report("horizon must be >= 1");

    std::set<int> seen_ids;
    for (std::size_t i = 0; i < instance.jobs.size(); ++i) {
        const Job& job = instance.jobs[i];
        if (!seen_ids.insert(job.id).second) {
            report("job " + std::to_string(i) + ": duplicate id " + std::to_string(job.id));
        }
        if (job.operations.empty()) {
            report("job " + std::to_string(i) + ": has no operations");
            continue;
        }
        for (std::size_t j = 0; j < job.operations.size(); ++j) {
            const Operation& op = job.operations[j];
            const std::string where = "job " + std::to_string(i) + ", op " + std::to_string(j);
            if (op.eligible.empty()) {
                report(where + ": empty eligible machine set");
                continue;
            }
            std::set<int> machines;
            for (const auto& opt : op.eligible) {
                if (opt.machine < 0 || opt.machine >= instance.machine_count) {
                    report(where + ": machine " + std::to_string(opt.machine) + " out of range");
                }
                if (opt.time < 1) {
                    report(where + ": processing time " + std::to_string(opt.time) + " must be >= 1");
                }
                if (!machines.insert(opt.machine).second) {
                    report(where + ": machine " + std::to_string(opt.machine) + " listed twice");
                }
            }
        }
    }
    return diags;
}

void save_instance(const std::filesystem::path& path, const FjsspInstance& instance, const SetupParams* params) {
    nlohmann::json doc;
    doc["machine_count"] = instance.machine_count;
    doc["horizon"] = instance.horizon;
    nlohmann::json jobs = nlohmann::json::array();
    for (const auto& job : instance.jobs) {
        nlohmann::json ops = nlohmann::json::array();
        for (const auto& op : job.operations) {
            nlohmann::json eligible = nlohmann::json::array();
            for (const auto& opt : op.eligible) {
                eligible.push_back({{"machine", opt.machine}, {"time", opt.time}});
            }
            ops.push_back(std::move(eligible));
        }
        jobs.push_back(std::move(ops));
    }
    doc["jobs"] = std::move(jobs);
    if (params != nullptr) {
        doc["params"] = {{"setup", static_cast<int>(params->setup)},
                         {"n", params->n},
                         {"k", params->k},
                         {"p", params->p},
                         {"t_window", params->t_window}};
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << doc.dump(2) << '\n';
}

namespace {

int require_int(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw std::runtime_error(where + ": missing key '" + key + "'");
    const auto& value = obj.at(key);
    if (!value.is_number_integer()) throw std::runtime_error(where + ": key '" + key + "' must be an integer");
    return value.get<int>();
}

}  // namespace

FjsspInstance load_instance(const std::filesystem::path& path, std::optional<SetupParams>* params_out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("instance file " + path.string() + ": " + e.what());
    }
    const std::string where = "instance file " + path.string();
    if (!doc.is_object()) throw std::runtime_error(where + ": top level must be an object");

    FjsspInstance instance;
    instance.machine_count = require_int(doc, "machine_count", where);
    instance.horizon = require_int(doc, "horizon", where);
    if (!doc.contains("jobs")) throw std::runtime_error(where + ": missing key 'jobs'");
    const auto& jobs = doc.at("jobs");
    if (!jobs.is_array()) throw std::runtime_error(where + ": key 'jobs' must be an array");

    int job_index = 0;
    for (const auto& job_json : jobs) {
        const std::string job_where = where + ", job " + std::to_string(job_index);
        if (!job_json.is_array()) throw std::runtime_error(job_where + ": must be an array of operations");
        Job job;
        job.id = job_index;
        for (const auto& op_json : job_json) {
            if (!op_json.is_array()) throw std::runtime_error(job_where + ": operation must be an array of {machine, time}");
            Operation op;
            for (const auto& opt_json : op_json) {
                if (!opt_json.is_object()) throw std::runtime_error(job_where + ": eligible entry must be an object");
                MachineOption opt;
                opt.machine = require_int(opt_json, "machine", job_where);
                opt.time = require_int(opt_json, "time", job_where);
                op.eligible.push_back(opt);
            }
            job.operations.push_back(std::move(op));
        }
        instance.jobs.push_back(std::move(job));
        ++job_index;
    }

    if (params_out != nullptr) {
        params_out->reset();
        if (doc.contains("params") && doc.at("params").is_object()) {
            const auto& p = doc.at("params");
            SetupParams params;
            params.setup = static_cast<Setup>(require_int(p, "setup", where + ", params"));
            params.n = require_int(p, "n", where + ", params");
            params.k = require_int(p, "k", where + ", params");
            params.p = require_int(p, "p", where + ", params");
            params.t_window = require_int(p, "t_window", where + ", params");
            *params_out = params;
        }
    }
    return instance;
}

}  // namespace fjsp

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fjsp {

// One admissible machine choice for an operation.
struct MachineOption {
    int machine = 0;
    int time = 1;
    bool operator==(const MachineOption&) const = default;
};

struct Operation {
    std::vector<MachineOption> eligible;
    bool operator==(const Operation&) const = default;

    // Smallest processing time over the eligible machines.
    int min_time() const;
};

struct Job {
    int id = 0;
    std::vector<Operation> operations;  // precedence order
    bool operator==(const Job&) const = default;
};

// Flexible job shop instance over discrete time steps 0..horizon-1.
// Immutable after construction; safe to share across solver runs.
struct FjsspInstance {
    int machine_count = 0;
    int horizon = 0;
    std::vector<Job> jobs;
    bool operator==(const FjsspInstance&) const = default;

    int total_operations() const;
};

enum class Setup { S1 = 1, S2 = 2, S3 = 3 };

// Parameters of the three generated instance families. All use square
// instances (n jobs, n operations per job, n machines); they differ in
// machine flexibility k, processing time p and start-time window T_r.
struct SetupParams {
    Setup setup = Setup::S1;
    int n = 1;         // jobs = operations per job = machines
    int k = 1;         // eligible machines per operation
    int p = 1;         // uniform processing time
    int t_window = 2;  // admissible start times per operation (T_r)

    static SetupParams s1(int n, int t_window = 2);
    static SetupParams s2(int n, int k, int t_window = 2);
    static SetupParams s3(int n, int k, int p);

    // Throws std::invalid_argument if the family rules are violated
    // (S1: k=1, p=1; S2: p=1; S3: t_window = p+1; always 1 <= k <= n).
    void validate() const;
};

// Builds the square instance for `params`: operation j of job i may run on
// machines (i+j+d) mod n for d in 0..k-1, all with processing time p.
// Horizon is n*p + 1. Deterministic.
FjsspInstance generate_instance(const SetupParams& params);

// Sum of minimum processing times of the preceding operations of the same
// job; 0 for the first operation. Throws std::out_of_range on bad indices.
int earliest_start(const FjsspInstance& instance, int job, int op);

// Empty iff all instance invariants hold; otherwise one message per
// violation with its location.
std::vector<std::string> validate_instance(const FjsspInstance& instance);

void save_instance(const std::filesystem::path& path, const FjsspInstance& instance,
                   const SetupParams* params = nullptr);

// Loads an instance JSON file. If the file carries generator parameters and
// `params_out` is non-null, they are reported back. Throws std::runtime_error
// with the offending key/field on malformed input.
FjsspInstance load_instance(const std::filesystem::path& path, std::optional<SetupParams>* params_out = nullptr);

}  // namespace fjsp

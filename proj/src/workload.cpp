#include "gridsched/workload.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <system_error>

#include "gridsched/errors.hpp"
#include "gridsched/rng.hpp"

namespace gridsched {

void Workload::validate() const {
    if (resources.empty()) {
        throw InvalidArgument("workload has no resources");
    }
    for (std::size_t i = 0; i < resources.size(); ++i) {
        const Resource& r = resources[i];
        if (r.id != i) {
            throw InvalidArgument("resource ids must be 0..m-1 in order; found " + std::to_string(r.id) +
                                  " at position " + std::to_string(i));
        }
        if (!(r.speed > 0.0) || !std::isfinite(r.speed)) {
            throw InvalidArgument("resource " + std::to_string(r.id) + " has non-positive speed");
        }
        if (r.capacity && *r.capacity < 1) {
            throw InvalidArgument("resource " + std::to_string(r.id) + " has capacity < 1");
        }
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task& t = tasks[i];
        if (t.id != i) {
            throw InvalidArgument("task ids must be 0..n-1 in order; found " + std::to_string(t.id) +
                                  " at position " + std::to_string(i));
        }
        if (!(t.cost > 0.0) || !std::isfinite(t.cost)) {
            throw InvalidArgument("task " + std::to_string(t.id) + " has non-positive cost");
        }
        if (!(t.arrival >= 0.0) || !std::isfinite(t.arrival)) {
            throw InvalidArgument("task " + std::to_string(t.id) + " has negative arrival");
        }
        if (t.deadline && !(*t.deadline > t.arrival)) {
            throw InvalidArgument("task " + std::to_string(t.id) + " has deadline not after arrival");
        }
    }
}

Workload generate_workload(const GenerateOptions& o) {
    if (o.n_tasks == 0) {
        throw InvalidArgument("generate_workload: n_tasks must be positive");
    }
    if (o.n_resources == 0) {
        throw InvalidArgument("generate_workload: n_resources must be positive");
    }
    if (!(o.cost_lo > 0.0) || !(o.cost_lo <= o.cost_hi)) {
        throw InvalidArgument("generate_workload: cost range must satisfy 0 < lo <= hi");
    }
    if (!(o.heterogeneity >= 0.0)) {
        throw InvalidArgument("generate_workload: heterogeneity must be >= 0");
    }
    if (o.deadline_slack && !(*o.deadline_slack > 0.0)) {
        throw InvalidArgument("generate_workload: deadline slack must be positive");
    }

    Rng rng(o.seed);
    Workload w;
    w.seed = o.seed;
    w.resources.reserve(o.n_resources);
    double speed_sum = 0.0;
    for (std::size_t r = 0; r < o.n_resources; ++r) {
        const double speed = rng.uniform(1.0, 1.0 + o.heterogeneity);
        speed_sum += speed;
        w.resources.push_back(Resource{static_cast<ResourceId>(r), speed, std::nullopt});
    }
    const double mean_speed = speed_sum / static_cast<double>(o.n_resources);

    w.tasks.reserve(o.n_tasks);
    for (std::size_t t = 0; t < o.n_tasks; ++t) {
        Task task;
        task.id = static_cast<TaskId>(t);
        task.cost = rng.uniform(o.cost_lo, o.cost_hi);
        task.arrival = 0.0;
        if (o.deadline_slack) {
            task.deadline = task.arrival + *o.deadline_slack * task.cost / mean_speed;
        }
        w.tasks.push_back(task);
    }
    return w;
}

std::string format_real(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

void write_workload(std::ostream& out, const Workload& w) {
    out << "workload v1 seed=" << w.seed << '\n';
    for (const Resource& r : w.resources) {
        out << "resource " << r.id << ' ' << format_real(r.speed);
        if (r.capacity) {
            out << " capacity=" << *r.capacity;
        }
        out << '\n';
    }
    for (const Task& t : w.tasks) {
        out << "task " << t.id << ' ' << format_real(t.cost) << ' ' << format_real(t.arrival);
        if (t.deadline) {
            out << " deadline=" << format_real(*t.deadline);
        }
        out << '\n';
    }
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
            ++i;
        }
        if (i > start) {
            fields.push_back(line.substr(start, i - start));
        }
    }
    return fields;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, std::string_view field) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError(line, std::string(field), "cannot parse '" + std::string(text) + "'");
    }
    return value;
}

// Accepts "key=value" and returns value, or throws.
std::string_view keyed(std::string_view token, std::string_view key, std::size_t line) {
    if (token.size() <= key.size() + 1 || token.substr(0, key.size()) != key || token[key.size()] != '=') {
        throw ParseError(line, std::string(key), "expected '" + std::string(key) + "=<value>', got '" +
                                                     std::string(token) + "'");
    }
    return token.substr(key.size() + 1);
}

} // namespace

Workload read_workload(std::istream& in) {
    Workload w;
    bool have_header = false;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        const auto fields = split_fields(line);
        if (fields.empty() || fields[0].front() == '#') {
            continue;
        }
        const std::string_view kind = fields[0];

        if (!have_header) {
            if (kind != "workload" || fields.size() != 3 || fields[1] != "v1") {
                throw ParseError(line_no, "header", "expected 'workload v1 seed=<u64>'");
            }
            w.seed = parse_number<std::uint64_t>(keyed(fields[2], "seed", line_no), line_no, "seed");
            have_header = true;
            continue;
        }

        if (kind == "resource") {
            if (!w.tasks.empty()) {
                throw ParseError(line_no, "resource", "resource lines must precede task lines");
            }
            if (fields.size() < 3 || fields.size() > 4) {
                throw ParseError(line_no, "resource", "expected 'resource <id> <speed> [capacity=<k>]'");
            }
            Resource r;
            r.id = parse_number<ResourceId>(fields[1], line_no, "id");
            if (r.id != w.resources.size()) {
                throw ParseError(line_no, "id",
                                 (r.id < w.resources.size() ? "duplicate resource id " : "resource id gap at ") +
                                     std::to_string(r.id));
            }
            r.speed = parse_number<double>(fields[2], line_no, "speed");
            if (!(r.speed > 0.0)) {
                throw ParseError(line_no, "speed", "speed must be positive");
            }
            if (fields.size() == 4) {
                r.capacity = parse_number<std::uint32_t>(keyed(fields[3], "capacity", line_no), line_no, "capacity");
                if (*r.capacity < 1) {
                    throw ParseError(line_no, "capacity", "capacity must be >= 1");
                }
            }
            w.resources.push_back(r);
        } else if (kind == "task") {
            if (fields.size() < 4 || fields.size() > 5) {
                throw ParseError(line_no, "task", "expected 'task <id> <cost> <arrival> [deadline=<d>]'");
            }
            Task t;
            t.id = parse_number<TaskId>(fields[1], line_no, "id");
            if (t.id != w.tasks.size()) {
                throw ParseError(line_no, "id",
                                 (t.id < w.tasks.size() ? "duplicate task id " : "task id gap at ") +
                                     std::to_string(t.id));
            }
            t.cost = parse_number<double>(fields[2], line_no, "cost");
            if (!(t.cost > 0.0)) {
                throw ParseError(line_no, "cost", "cost must be positive");
            }
            t.arrival = parse_number<double>(fields[3], line_no, "arrival");
            if (!(t.arrival >= 0.0)) {
                throw ParseError(line_no, "arrival", "arrival must be non-negative");
            }
            if (fields.size() == 5) {
                t.deadline = parse_number<double>(keyed(fields[4], "deadline", line_no), line_no, "deadline");
                if (!(*t.deadline > t.arrival)) {
                    throw ParseError(line_no, "deadline", "deadline must be after arrival");
                }
            }
            w.tasks.push_back(t);
        } else {
            throw ParseError(line_no, "record", "unknown record '" + std::string(kind) + "'");
        }
    }
    if (!have_header) {
        throw ParseError(line_no, "header", "missing 'workload v1' header");
    }
    if (w.resources.empty()) {
        throw ParseError(line_no, "resource", "workload declares no resources");
    }
    return w;
}

void save_workload(const Workload& workload, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::system_error(errno, std::generic_category(), "cannot open " + path.string() + " for writing");
    }
    write_workload(out, workload);
    if (!out) {
        throw std::system_error(errno, std::generic_category(), "write failed: " + path.string());
    }
}

Workload load_workload(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::system_error(errno, std::generic_category(), "cannot open " + path.string());
    }
    return read_workload(in);
}

} // namespace gridsched

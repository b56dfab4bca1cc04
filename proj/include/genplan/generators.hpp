#pragma once

#include "genplan/error.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

// Instance generators for the bundled domains. Each returns problem text for
// the matching file under data/domains.
namespace genplan::gen {

namespace detail {

inline std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
        if (!out.empty())
            out += ' ';
        out += s;
    }
    return out;
}

inline std::string problem(const std::string& name, const std::string& domain, const std::string& objects,
                           const std::vector<std::string>& init, const std::vector<std::string>& goal) {
    std::ostringstream out;
    out << "(define (problem " << name << ")\n  (:domain " << domain << ")\n  (:objects " << objects
        << ")\n  (:init";
    for (const auto& a : init)
        out << "\n    " << a;
    out << ")\n  (:goal (and";
    for (const auto& a : goal)
        out << "\n    " << a;
    out << ")))\n";
    return out.str();
}

/// Random partition of blocks 0..n-1 into towers, listed bottom to top.
inline std::vector<std::vector<int>> random_towers(int n, std::mt19937_64& rng, bool single) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<int>> towers;
    for (int b : order) {
        const bool extend = !towers.empty() && (single || std::uniform_int_distribution<int>(0, 1)(rng) == 1);
        if (extend)
            towers.back().push_back(b);
        else
            towers.push_back({b});
    }
    return towers;
}

inline std::string cell(int x, int y) { return "c" + std::to_string(x) + "_" + std::to_string(y); }

} // namespace detail

/// Robot and all balls start in rooma; every ball must end in roomb.
inline std::string gripper(int balls) {
    if (balls < 1)
        throw Error(ErrorCode::InvalidArgument, "gripper needs at least one ball");
    std::vector<std::string> objects{"rooma", "roomb", "left", "right"};
    std::vector<std::string> init{"(room rooma)", "(room roomb)", "(gripper left)", "(gripper right)",
                                  "(at-robby rooma)", "(free left)", "(free right)"};
    std::vector<std::string> goal;
    for (int i = 1; i <= balls; ++i) {
        const auto b = "ball" + std::to_string(i);
        objects.push_back(b);
        init.push_back("(ball " + b + ")");
        init.push_back("(at " + b + " rooma)");
        goal.push_back("(at " + b + " roomb)");
    }
    return detail::problem("gripper-" + std::to_string(balls), "gripper-strips", detail::join(objects), init, goal);
}

/// Robot and balls start in random rooms. Every ball has a random goal room,
/// or roomb when random_goal is false. The initial state is never a goal state.
inline std::string gripper_random(int balls, std::uint64_t seed, bool random_goal = true) {
    if (balls < 1)
        throw Error(ErrorCode::InvalidArgument, "gripper needs at least one ball");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coin(0, 1);
    const char* rooms[] = {"rooma", "roomb"};
    std::vector<int> start(balls), target(balls);
    do {
        for (int i = 0; i < balls; ++i) {
            start[i] = coin(rng);
            target[i] = random_goal ? coin(rng) : 1;
        }
    } while (start == target);
    std::vector<std::string> objects{"rooma", "roomb", "left", "right"};
    std::vector<std::string> init{"(room rooma)", "(room roomb)", "(gripper left)", "(gripper right)",
                                  std::string("(at-robby ") + rooms[coin(rng)] + ")", "(free left)", "(free right)"};
    std::vector<std::string> goal;
    for (int i = 0; i < balls; ++i) {
        const auto b = "ball" + std::to_string(i + 1);
        objects.push_back(b);
        init.push_back("(ball " + b + ")");
        init.push_back("(at " + b + " " + rooms[start[i]] + ")");
        goal.push_back("(at " + b + " " + rooms[target[i]] + ")");
    }
    return detail::problem("gripper-" + std::to_string(balls) + "-r" + std::to_string(seed), "gripper-strips",
                           detail::join(objects), init, goal);
}

/// Random initial towers; the goal is a single tower (single = true) or a
/// random set of towers.
inline std::string blocks(int n, std::uint64_t seed, bool single) {
    if (n < 1)
        throw Error(ErrorCode::InvalidArgument, "blocks needs at least one block");
    std::mt19937_64 rng(seed);
    auto name = [](int b) { return "b" + std::to_string(b + 1); };
    std::vector<std::string> objects;
    for (int b = 0; b < n; ++b)
        objects.push_back(name(b));
    auto describe = [&](const std::vector<std::vector<int>>& towers, bool with_table) {
        std::vector<std::string> atoms;
        for (const auto& t : towers) {
            if (with_table)
                atoms.push_back("(ontable " + name(t.front()) + ")");
            for (std::size_t i = 1; i < t.size(); ++i)
                atoms.push_back("(on " + name(t[i]) + " " + name(t[i - 1]) + ")");
            if (with_table)
                atoms.push_back("(clear " + name(t.back()) + ")");
        }
        return atoms;
    };
    auto init = describe(detail::random_towers(n, rng, false), true);
    init.push_back("(handempty)");
    // Goals already true at init are redrawn; one block has no other goal.
    std::vector<std::string> goal;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const auto goal_towers = detail::random_towers(n, rng, single);
        goal = describe(goal_towers, false);
        // All-singleton goals have no on-atoms; ask for one block on the table.
        if (goal.empty())
            goal.push_back("(ontable " + name(goal_towers.front().front()) + ")");
        const bool satisfied = std::all_of(goal.begin(), goal.end(), [&](const std::string& g) {
            return std::find(init.begin(), init.end(), g) != init.end();
        });
        if (!satisfied || n == 1)
            break;
    }
    return detail::problem(std::string(single ? "blocks-single-" : "blocks-multiple-") + std::to_string(n) + "-" +
                               std::to_string(seed),
                           "blocks", detail::join(objects), init, goal);
}

/// One truck on a width x height grid; packages start and end on random cells.
inline std::string delivery(int width, int height, int packages, std::uint64_t seed) {
    if (width < 1 || height < 1 || packages < 1)
        throw Error(ErrorCode::InvalidArgument, "delivery needs a non-empty grid and a package");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> cx(0, width - 1), cy(0, height - 1);
    std::vector<std::string> cells, init;
    for (int x = 0; x < width; ++x)
        for (int y = 0; y < height; ++y) {
            cells.push_back(detail::cell(x, y));
            const int nb[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
            for (const auto& d : nb)
                if (d[0] >= 0 && d[0] < width && d[1] >= 0 && d[1] < height)
                    init.push_back("(adjacent " + detail::cell(x, y) + " " + detail::cell(d[0], d[1]) + ")");
        }
    std::string objects = detail::join(cells) + " - cell truck1 - truck";
    init.push_back("(at truck1 " + detail::cell(cx(rng), cy(rng)) + ")");
    init.push_back("(empty truck1)");
    std::vector<std::string> goal;
    for (int p = 1; p <= packages; ++p) {
        const auto name = "p" + std::to_string(p);
        objects += " " + name + " - package";
        int x0 = cx(rng), y0 = cy(rng), x1, y1;
        do {
            x1 = cx(rng);
            y1 = cy(rng);
        } while (width * height > 1 && x1 == x0 && y1 == y0);
        init.push_back("(at " + name + " " + detail::cell(x0, y0) + ")");
        goal.push_back("(at " + name + " " + detail::cell(x1, y1) + ")");
    }
    return detail::problem("delivery-" + std::to_string(width) + "x" + std::to_string(height) + "-" +
                               std::to_string(packages) + "-" + std::to_string(seed),
                           "delivery", objects, init, goal);
}

/// A corridor shed -> l1 .. ln -> gate with spanners scattered along it and
/// loose nuts at the gate.
inline std::string spanner(int locations, int spanners, int nuts, std::uint64_t seed) {
    if (locations < 1 || nuts < 1 || spanners < nuts)
        throw Error(ErrorCode::InvalidArgument, "spanner needs a location, a nut and enough spanners");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> where(1, locations);
    std::vector<std::string> locs{"shed"};
    for (int i = 1; i <= locations; ++i)
        locs.push_back("l" + std::to_string(i));
    locs.push_back("gate");
    std::string objects = detail::join(locs) + " - location bob - man";
    std::vector<std::string> init{"(at bob shed)"};
    for (std::size_t i = 0; i + 1 < locs.size(); ++i)
        init.push_back("(link " + locs[i] + " " + locs[i + 1] + ")");
    for (int s = 1; s <= spanners; ++s) {
        const auto name = "spanner" + std::to_string(s);
        objects += " " + name + " - spanner";
        init.push_back("(at " + name + " l" + std::to_string(where(rng)) + ")");
        init.push_back("(useable " + name + ")");
    }
    std::vector<std::string> goal;
    for (int n = 1; n <= nuts; ++n) {
        const auto name = "nut" + std::to_string(n);
        objects += " " + name + " - nut";
        init.push_back("(at " + name + " gate)");
        init.push_back("(loose " + name + ")");
        goal.push_back("(tightened " + name + ")");
    }
    return detail::problem("spanner-" + std::to_string(locations) + "-" + std::to_string(spanners) + "-" +
                               std::to_string(nuts) + "-" + std::to_string(seed),
                           "spanner", objects, init, goal);
}

/// Robot in a corner of a width x height grid; every cell must be visited.
inline std::string visitall(int width, int height) {
    if (width < 1 || height < 1 || width * height < 2)
        throw Error(ErrorCode::InvalidArgument, "visitall needs at least two cells");
    std::vector<std::string> cells, init, goal;
    for (int x = 0; x < width; ++x)
        for (int y = 0; y < height; ++y) {
            cells.push_back(detail::cell(x, y));
            goal.push_back("(visited " + detail::cell(x, y) + ")");
            const int nb[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
            for (const auto& d : nb)
                if (d[0] >= 0 && d[0] < width && d[1] >= 0 && d[1] < height)
                    init.push_back("(connected " + detail::cell(x, y) + " " + detail::cell(d[0], d[1]) + ")");
        }
    init.push_back("(at-robot " + detail::cell(0, 0) + ")");
    init.push_back("(visited " + detail::cell(0, 0) + ")");
    return detail::problem("visitall-" + std::to_string(width) + "x" + std::to_string(height), "grid-visit-all",
                           detail::join(cells) + " - place", init, goal);
}

/// Cities with `locations` places each (the first one an airport), one truck
/// per city, `airplanes` planes at random airports and packages with random
/// origins and destinations.
inline std::string logistics(int cities, int locations, int airplanes, int packages, std::uint64_t seed) {
    if (cities < 1 || locations < 1 || packages < 1 || (cities > 1 && airplanes < 1))
        throw Error(ErrorCode::InvalidArgument, "logistics parameters are out of range");
    std::mt19937_64 rng(seed);
    std::vector<std::string> init;
    std::string objects;
    std::vector<std::string> places;
    for (int c = 1; c <= cities; ++c) {
        const auto city = "city" + std::to_string(c);
        objects += city + " - city ";
        for (int l = 1; l <= locations; ++l) {
            const auto place = "loc" + std::to_string(c) + "_" + std::to_string(l);
            objects += place + (l == 1 ? " - airport " : " - location ");
            init.push_back("(in-city " + place + " " + city + ")");
            places.push_back(place);
        }
        const auto truck = "truck" + std::to_string(c);
        objects += truck + " - truck ";
        init.push_back("(at " + truck + " loc" + std::to_string(c) + "_1)");
    }
    std::uniform_int_distribution<int> pick_city(1, cities);
    for (int a = 1; a <= airplanes; ++a) {
        const auto plane = "plane" + std::to_string(a);
        objects += plane + " - airplane ";
        init.push_back("(at " + plane + " loc" + std::to_string(pick_city(rng)) + "_1)");
    }
    std::uniform_int_distribution<std::size_t> pick_place(0, places.size() - 1);
    std::vector<std::string> goal;
    for (int p = 1; p <= packages; ++p) {
        const auto pkg = "pkg" + std::to_string(p);
        objects += pkg + " - package ";
        std::size_t from = pick_place(rng), to;
        do {
            to = pick_place(rng);
        } while (places.size() > 1 && to == from);
        init.push_back("(at " + pkg + " " + places[from] + ")");
        goal.push_back("(at " + pkg + " " + places[to] + ")");
    }
    objects.pop_back();
    return detail::problem("logistics-" + std::to_string(cities) + "-" + std::to_string(locations) + "-" +
                               std::to_string(airplanes) + "-" + std::to_string(packages) + "-" +
                               std::to_string(seed),
                           "logistics", objects, init, goal);
}

} // namespace genplan::gen

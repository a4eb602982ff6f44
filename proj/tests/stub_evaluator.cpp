// SPDX-License-Identifier: Apache-2.0
// Test double for the external evaluator protocol. The first argument picks
// the behaviour: score=<v>, bare=<v>, synthetic, fail, garbage, wrongid,
// silent or sleep=<seconds>.
#include <chrono>
#include <iostream>
#include <string>
#include <thread>

#include "curvelane/data_io.hpp"
#include "curvelane/evaluator.hpp"

int main(int argc, char** argv)
{
    const std::string mode = argc > 1 ? argv[1] : "score=0.5";
    std::string line;
    std::getline(std::cin, line);
    const auto request = curvelane::io::json::parse(line);
    const auto id = request.at("eval_id").get<std::uint64_t>();

    auto value_of = [&](const std::string& prefix) { return std::stod(mode.substr(prefix.size())); };
    if (mode.rfind("score=", 0) == 0) {
        std::cout << curvelane::io::json{{"eval_id", id}, {"score", value_of("score=")}}.dump() << "\n";
    } else if (mode.rfind("bare=", 0) == 0) {
        std::cout << curvelane::io::json{{"score", value_of("bare=")}}.dump() << "\n";
    } else if (mode == "synthetic") {
        const auto req = curvelane::io::eval_request_from_json(request);
        std::cout << curvelane::io::json{{"eval_id", id}, {"score", curvelane::synthetic_score(req.arch, req.resolution)}}
                         .dump()
                  << "\n";
    } else if (mode == "fail") {
        return 7;
    } else if (mode == "garbage") {
        std::cout << "not json\n";
    } else if (mode == "wrongid") {
        std::cout << curvelane::io::json{{"eval_id", id + 1}, {"score", 0.5}}.dump() << "\n";
    } else if (mode.rfind("sleep=", 0) == 0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(value_of("sleep=")));
        std::cout << curvelane::io::json{{"eval_id", id}, {"score", 0.5}}.dump() << "\n";
    }
    return 0;
}

#pragma once
// Published cube probability matrices for the six- and eight-zero types,
// transcribed entry by entry.

#include <string>
#include <vector>

namespace mtlz::reference {

inline const std::vector<std::vector<std::string>> kSixZeros{
    {"p1 p2 p3", "p2 p3 q1", "p3 q2", "0", "p2 q3", "0", "q2 q3", "0"},
    {"p2 p3 q1", "p1 p2 p3", "0", "p3 q2", "0", "p2 q3", "0", "q2 q3"},
    {"p3 q2", "0", "p1 p2 p3", "p2 p3 q1", "p1 q2 q3", "q1 q2 q3", "p1 p2 q3", "p2 q1 q3"},
    {"0", "p3 q2", "p2 p3 q1", "p1 p2 p3", "q1 q2 q3", "p1 q2 q3", "p2 q1 q3", "p1 p2 q3"},
    {"p2 q3", "0", "p1 q2 q3", "q1 q2 q3", "p1 p2 p3", "p2 p3 q1", "p1 p3 q2", "p3 q1 q2"},
    {"0", "p2 q3", "q1 q2 q3", "p1 q2 q3", "p2 p3 q1", "p1 p2 p3", "p3 q1 q2", "p1 p3 q2"},
    {"q2 q3", "0", "p1 p2 q3", "p2 q1 q3", "p1 p3 q2", "p3 q1 q2", "p1 p2 p3", "p2 p3 q1"},
    {"0", "q2 q3", "p2 q1 q3", "p1 p2 q3", "p3 q1 q2", "p1 p3 q2", "p2 p3 q1", "p1 p2 p3"}};

inline const std::vector<std::vector<std::string>> kEightZeros{
    {"p1 p2 p3", "p2 p3 q1", "p1 p3 q2", "p3 q1 q2", "p2 q3", "0", "q2 q3", "0"},
    {"p2 p3 q1", "p1 p2 p3", "p3 q1 q2", "p1 p3 q2", "0", "p2 q3", "0", "q2 q3"},
    {"p1 p3 q2", "p3 q1 q2", "p1 p2 p3", "p2 p3 q1", "q2 q3", "0", "p2 q3", "0"},
    {"p3 q1 q2", "p1 p3 q2", "p2 p3 q1", "p1 p2 p3", "0", "q2 q3", "0", "p2 q3"},
    {"p2 q3", "0", "q2 q3", "0", "p1 p2 p3", "p2 p3 q1", "p1 p3 q2", "p3 q1 q2"},
    {"0", "p2 q3", "0", "q2 q3", "p2 p3 q1", "p1 p2 p3", "p3 q1 q2", "p1 p3 q2"},
    {"q2 q3", "0", "p2 q3", "0", "p1 p3 q2", "p3 q1 q2", "p1 p2 p3", "p2 p3 q1"},
    {"0", "q2 q3", "0", "p2 q3", "p3 q1 q2", "p1 p3 q2", "p2 p3 q1", "p1 p2 p3"}};

}  // namespace mtlz::reference

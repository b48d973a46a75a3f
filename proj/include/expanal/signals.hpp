#ifndef EXPANAL_SIGNALS_HPP
#define EXPANAL_SIGNALS_HPP

#include <string>
#include <vector>

#include <expanal/expsum.hpp>

namespace expanal::signals
{

//
// Reference signals of the numerical experiments, with the period and grid
// half-width each was recovered from (tau = 0 where no sparse run exists).
//
struct Reference
{
    std::string name;
    ExponentialSum sum;
    double period;
    int half_width;
    int tau;
};

ExponentialSum f1();
ExponentialSum f2();
ExponentialSum f3();
ExponentialSum f4();
ExponentialSum f5();
ExponentialSum f6();
ExponentialSum f7();

std::vector<Reference> all();
Reference by_name(const std::string& name);

} // namespace expanal::signals

#endif

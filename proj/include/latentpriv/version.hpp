#ifndef LATENTPRIV_VERSION_HPP
#define LATENTPRIV_VERSION_HPP

#define LATENTPRIV_VERSION "1.0.0"

#endif  // LATENTPRIV_VERSION_HPP

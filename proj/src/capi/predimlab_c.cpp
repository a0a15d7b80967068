#include <predimlab.h>

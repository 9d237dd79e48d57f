import time

from DiscoJamEngine import DirsProfile, ScenarioConfig, anti_jamming_precoder, zf_precoder
from DiscoJamEngine.harness import sample_trial

config = ScenarioConfig()
profile = DirsProfile.from_case("c2", num_elements=config.num_elements)

# one realization to precode repeatedly
trial = sample_trial(config, profile, seed=0, drop=0, realization=0)
H_rpt = trial.H_rpt


def timerfunc(func):
    """
    A timer decorator
    """

    def function_timer(*args, **kwargs):
        """
        A nested function for timing other functions
        """
        start = time.time()
        value = func(*args, **kwargs)
        end = time.time()
        runtime = end - start
        msg = "The runtime for {func} took {time} seconds to complete 1000 times"
        print(msg.format(func=func.__name__, time=runtime))
        return value

    return function_timer


@timerfunc
def zf_test():
    for _ in range(1000):
        zf_precoder(H_rpt, trial.powers)


@timerfunc
def ajp_test():
    for _ in range(1000):
        anti_jamming_precoder(H_rpt, trial.closed_form, trial.noise, config.tx_power)


if __name__ == "__main__":
    zf_test()
    ajp_test()

"""Station siting workflow maker."""
from dataclasses import dataclass, field

from jobflow import Flow, Maker

from .jobs import generate_trips_job, optimize_job, oracle_job


@dataclass
class StationSitingMaker(Maker):
    """Station siting workflow maker.

    Attributes:
        name(str):
            The name of the siting project.

            .. note:: Since the underscore ("_") will be used to separate
             the fields in job names, it should not appear in the project
             name here!

        options(dict):
            A dictionary including all options of demand generation, evaluation,
            the GA and the oracle. For available options, see docs in
            preprocessing.py.
        validate_with_oracle(bool):
            Whether to also find the exact optimum by enumeration. Only
            practical on small networks. Default to False.
    """

    name: str = "pev-siting"
    options: dict = field(default_factory=dict)
    validate_with_oracle: bool = False

    def make(self, network, trips=None):
        """Make the workflow.

        Args:
            network(Network):
                The road network.
            trips(list of Trip): optional
                Trips to serve. If not given, trips are generated from the
                demand options first.

        Returns:
            Flow:
                A flow whose output is the GA document, or a dictionary with
                keys "ga" and "oracle" when validating with the oracle.
        """
        jobs = []
        if trips is None:
            generation = generate_trips_job(network, self.options)
            generation.name = self.name + "_generate_trips"
            jobs.append(generation)
            trips = generation.output

        optimization = optimize_job(network, trips, self.options)
        optimization.name = self.name + "_optimize"
        jobs.append(optimization)
        output = optimization.output

        if self.validate_with_oracle:
            oracle = oracle_job(network, trips, self.options)
            oracle.name = self.name + "_oracle"
            jobs.append(oracle)
            output = {"ga": optimization.output, "oracle": oracle.output}

        return Flow(jobs, output=output, name=self.name)

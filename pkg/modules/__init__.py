"""Virtual-qubit thermal machine simulator."""

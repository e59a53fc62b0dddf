"""Set-partition combinatorics and Pitman-Yor partition laws."""

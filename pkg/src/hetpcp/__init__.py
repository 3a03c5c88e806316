"""HetNet PCP — 클러스터 사용자/소형셀 2-tier HetNet 커버리지 해석 + 몬테카를로 검증."""

__version__ = "0.1.0"
